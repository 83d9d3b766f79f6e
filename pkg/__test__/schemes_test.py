import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import schemes
from schemes import ExplicitScheme, ImexScheme, get_scheme
from spreading.domain import make_exterior, make_plane, square_extent
from spreading.params import KineticParams
from spreading.stencil import laplacian_neumann, neumann_matrix

P0 = KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.5)


def random_state(mask, seed):
    rng = np.random.default_rng(seed)
    u = np.where(mask.inside, rng.uniform(size=mask.shape), 0.0)
    v = np.where(mask.inside, rng.uniform(size=mask.shape), 0.0)
    return u, v


class TestStencil(unittest.TestCase):
    def setUp(self):
        self.mask = make_exterior(1.5, square_extent(5.0), 0.5)

    def test_constant_field_has_zero_laplacian(self):
        lap = laplacian_neumann(np.full(self.mask.shape, 0.7), self.mask)
        self.assertLess(np.max(np.abs(lap)), 1e-12)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_fluxes_telescope(self, seed):
        field, _ = random_state(self.mask, seed)
        lap = laplacian_neumann(field, self.mask)
        self.assertAlmostEqual(float(lap[self.mask.inside].sum()), 0.0, delta=1e-9)

    def test_matrix_matches_array_stencil(self):
        field, _ = random_state(self.mask, 1)
        L = neumann_matrix(self.mask)
        flat = self.mask.inside_flat
        from_matrix = L @ field.ravel()[flat]
        from_array = laplacian_neumann(field, self.mask).ravel()[flat]
        self.assertTrue(np.allclose(from_matrix, from_array, atol=1e-12))
        self.assertLess(abs(L - L.T).max(), 1e-15)
        self.assertLess(np.max(np.abs(np.asarray(L.sum(axis=1)).ravel())), 1e-12)


class TestRegistry(unittest.TestCase):
    def test_lookup_is_case_insensitive(self):
        self.assertIs(get_scheme("imex"), ImexScheme)
        self.assertIs(get_scheme("EXPLICIT"), ExplicitScheme)
        self.assertIs(get_scheme(None), ExplicitScheme)
        self.assertEqual(set(schemes.SCHEMES), {"EXPLICIT", "IMEX"})
        with self.assertRaises(ValueError):
            get_scheme("rk4")


class TestExplicitScheme(unittest.TestCase):
    def setUp(self):
        self.mask = make_exterior(1.5, square_extent(5.0), 0.5)

    def test_step_bound(self):
        limit = ExplicitScheme.stable_dt(self.mask, P0, 1.0)
        self.assertAlmostEqual(limit, 1.0 / (16.0 + 2.5))
        with self.assertRaises(ValueError):
            ExplicitScheme(self.mask, P0, dt=1.01 * limit)

    def test_stays_in_unit_box(self):
        u, v = random_state(self.mask, 2)
        with ExplicitScheme(self.mask, P0) as scheme:
            for _ in range(20):
                u, v = scheme.step(u, v)
        inside = self.mask.inside
        for field in (u, v):
            self.assertGreaterEqual(field[inside].min(), -1e-12)
            self.assertLessEqual(field[inside].max(), 1.0 + 1e-12)
            self.assertTrue(np.all(field[~inside] == 0.0))

    def test_worker_count_does_not_change_bits(self):
        u0, v0 = random_state(self.mask, 4)
        results = []
        for workers in (1, 3):
            u, v = u0, v0
            with ExplicitScheme(self.mask, P0, workers=workers, tile_rows=4) as scheme:
                for _ in range(10):
                    u, v = scheme.step(u, v)
            results.append((u, v))
        self.assertEqual(results[0][0].tobytes(), results[1][0].tobytes())
        self.assertEqual(results[0][1].tobytes(), results[1][1].tobytes())

    def test_resident_state_is_steady(self):
        u = np.zeros(self.mask.shape)
        v = np.where(self.mask.inside, 1.0, 0.0)
        with ExplicitScheme(self.mask, P0) as scheme:
            u1, v1 = scheme.step(u, v)
        self.assertTrue(np.array_equal(u1, u))
        self.assertTrue(np.array_equal(v1, v))


class TestImexScheme(unittest.TestCase):
    def setUp(self):
        self.mask = make_exterior(1.5, square_extent(5.0), 0.5)

    def test_step_bound_ignores_diffusion(self):
        self.assertAlmostEqual(ImexScheme.stable_dt(self.mask, P0), 1.0 / 2.5)

    def test_solvers_agree(self):
        u, v = random_state(self.mask, 5)
        with ImexScheme(self.mask, P0, dt=0.2, linear_solver="direct") as direct:
            ud, vd = direct.step(u, v)
        with ImexScheme(self.mask, P0, dt=0.2, linear_solver="cg") as iterative:
            uc, vc = iterative.step(u, v)
        self.assertTrue(np.allclose(ud, uc, atol=1e-9))
        self.assertTrue(np.allclose(vd, vc, atol=1e-9))

    def test_diffusion_conserves_mass(self):
        w, _ = random_state(self.mask, 6)
        with ImexScheme(self.mask, P0, dt=0.3) as scheme:
            out = scheme.diffuse(w, 2.0)
        inside = self.mask.inside
        self.assertAlmostEqual(float(out[inside].sum()), float(w[inside].sum()), delta=1e-8)
        self.assertLessEqual(out[inside].max(), w[inside].max() + 1e-12)

    def test_unknown_linear_solver(self):
        with self.assertRaises(ValueError):
            ImexScheme(make_plane(square_extent(1.0), 0.5), P0, linear_solver="gmres")


if __name__ == "__main__":
    unittest.main()
