import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from spreading.domain import (
    DirectionQuery,
    DomainMask,
    build_mask,
    check_hypothesis_Hyz,
    compute_R,
    cusp_half_width,
    cusp_profile,
    geodesic_distance,
    geodesic_field,
    interior_ball_radius,
    make_comb_complement,
    make_cusp,
    make_exterior,
    make_half_cylinder,
    make_plane,
    make_quarter_space,
    make_spiral,
    ray_limit,
    square_extent,
)
from spreading.errors import (
    DisconnectedMaskError,
    EmptyMaskError,
    PreconditionError,
    ResolutionError,
)


class TestDomainMask(unittest.TestCase):
    def test_plane_geometry(self):
        mask = make_plane(square_extent(2.0), 0.5)
        self.assertEqual(mask.shape, (9, 9))
        self.assertEqual(mask.inside_count, 81)
        self.assertEqual(mask.bounds, (-2.0, 2.0, -2.0, 2.0))
        self.assertEqual(mask.descriptor["generator"], "plane")

    def test_empty_and_disconnected(self):
        with self.assertRaises(EmptyMaskError):
            DomainMask(np.zeros((3, 3), dtype=bool), 1.0, (0.0, 0.0))
        with self.assertRaises(DisconnectedMaskError) as ctx:
            DomainMask(np.array([[True, False, True]]), 1.0, (0.0, 0.0))
        self.assertEqual(ctx.exception.components, 2)

    def test_inside_is_read_only(self):
        mask = make_plane(square_extent(1.0), 0.5)
        with self.assertRaises(ValueError):
            mask.inside[0, 0] = False

    def test_cell_of_rounds_to_nearest_center(self):
        mask = make_plane(square_extent(2.0), 0.5)
        self.assertEqual(mask.cell_of((0.26, -0.24)), (4, 5))
        self.assertEqual(mask.cell_of((100.0, -100.0)), (0, 8))
        self.assertFalse(mask.contains((100.0, 0.0)))

    @given(st.floats(min_value=-2.2, max_value=2.2), st.floats(min_value=-2.2, max_value=2.2))
    @settings(max_examples=100, deadline=None)
    def test_plane_contains_every_point_of_its_cells(self, x, y):
        mask = make_plane(square_extent(2.0), 0.5)
        self.assertTrue(mask.contains((x, y)))

    def test_build_mask_by_name(self):
        mask = build_mask("plane", extent=[-1, 1, -1, 1], h=0.5)
        self.assertEqual(mask.inside_count, 25)
        with self.assertRaises(PreconditionError):
            build_mask("torus", extent=[-1, 1, -1, 1], h=0.5)


class TestGenerators(unittest.TestCase):
    def test_exterior(self):
        mask = make_exterior(1.0, square_extent(3.0), 0.5)
        # 13 centers lie in the closed unit disk
        self.assertEqual(mask.inside_count, 13 * 13 - 13)
        self.assertFalse(mask.contains((0.0, 0.0)))
        self.assertTrue(mask.contains((2.0, 2.0)))
        with self.assertRaises(PreconditionError):
            make_exterior(3.0, square_extent(3.0), 0.5)

    def test_half_cylinder(self):
        mask = make_half_cylinder((1.0, 0.0), 0.0, (0.0, 0.0), 1.0, (-2.0, 10.0, -3.0, 3.0), 0.5)
        self.assertEqual(mask.inside_count, 3 * 21)
        self.assertFalse(mask.contains((-1.0, 0.0)))
        self.assertTrue(mask.contains((5.0, 0.5)))

    def test_quarter_space_needs_orthogonal_axes(self):
        with self.assertRaises(PreconditionError):
            make_quarter_space((1.0, 0.0), (1.0, 1.0), 0.0, 0.0, square_extent(5.0), 0.5)
        mask = make_quarter_space((1.0, 0.0), (0.0, 1.0), 0.0, 0.0, square_extent(5.0), 0.5)
        self.assertTrue(mask.contains((2.0, 2.0)))
        self.assertFalse(mask.contains((-2.0, 2.0)))

    def test_comb_teeth_and_clamping(self):
        mask = make_comb_complement((-6.0, 30.0, -8.0, 24.0), 0.5)
        self.assertFalse(mask.contains((3.0, 5.0)))
        self.assertTrue(mask.contains((3.5, 5.0)))
        self.assertFalse(mask.contains((10.0, 0.0)))
        self.assertTrue(mask.contains((10.0, -3.0)))
        self.assertEqual(mask.descriptor["first_clamped_tooth"], 5)

    def test_spiral(self):
        mask = make_spiral(square_extent(12.0), 0.25)
        self.assertAlmostEqual(mask.descriptor["t_max"], 10.75)
        self.assertTrue(mask.contains((0.0, 0.0)))
        self.assertFalse(mask.contains((9.0, 0.0)))
        with self.assertRaises(ResolutionError):
            make_spiral(square_extent(12.0), 0.5, tube_radius=2.9)

    def test_cusp(self):
        self.assertAlmostEqual(float(cusp_profile(0.0)), math.exp(-1.0))
        self.assertEqual(float(cusp_half_width(-0.5, 0.0, 0.05)), 1.0)
        self.assertEqual(float(cusp_half_width(9.0, 0.0, 0.05)), 0.05)
        with self.assertRaises(ResolutionError):
            make_cusp(0.0, (-1.0, 5.0, -1.0, 1.0), 0.1, 0.05)
        mask = make_cusp(0.0, (-1.0, 5.0, -1.0, 1.0), 0.025, 0.05, length=4.0)
        self.assertTrue(mask.contains((-0.5, 0.5)))
        self.assertFalse(mask.contains((3.0, 0.5)))
        self.assertLessEqual(mask.descriptor["clamp_x"], 5.0)


class TestQueries(unittest.TestCase):
    def test_direction_query(self):
        with self.assertRaises(PreconditionError):
            DirectionQuery((1.0, 1.0))
        q = DirectionQuery.of((3.0, 4.0), (0.0, 2.0))
        self.assertAlmostEqual(q.e[0], 0.6)
        self.assertAlmostEqual(q.e[1], 0.8)
        self.assertAlmostEqual(DirectionQuery.of((1.0, 0.0), (0.0, 2.0)).transverse(), 2.0)

    def test_ray_limit(self):
        mask = make_plane(square_extent(4.0), 0.5)
        self.assertAlmostEqual(ray_limit(mask, DirectionQuery.of((1.0, 0.0), (1.0, 0.0))), 3.0)
        with self.assertRaises(PreconditionError):
            ray_limit(mask, DirectionQuery.of((1.0, 0.0), (10.0, 0.0)))

    def test_tube_radius_on_plane_is_zero(self):
        mask = make_plane(square_extent(4.0), 0.5)
        self.assertEqual(compute_R(mask, DirectionQuery.of((1.0, 0.0))), 0.0)

    def test_tube_radius_beside_half_cylinder(self):
        mask = make_half_cylinder((1.0, 0.0), 0.0, (0.0, 0.0), 1.0, (-2.0, 20.0, -6.0, 6.0), 0.5)
        R = compute_R(mask, DirectionQuery.of((1.0, 0.0), (0.0, 4.0)))
        self.assertAlmostEqual(R, 3.5)

    def test_geodesic_distance(self):
        plane = make_plane(square_extent(3.0), 0.5)
        self.assertAlmostEqual(geodesic_distance(plane, (0.0, 0.0), (2.0, 0.0)).distance, 2.0)
        exterior = make_exterior(1.0, square_extent(3.0), 0.5)
        around = geodesic_distance(exterior, (-2.0, 0.0), (2.0, 0.0))
        self.assertGreater(around.distance, 4.0)
        self.assertAlmostEqual(around.error_bound, around.distance * 0.0823922, places=5)
        with self.assertRaises(PreconditionError):
            geodesic_distance(exterior, (0.0, 0.0), (2.0, 0.0))

    def test_diagonal_moves_need_open_corners(self):
        inside = np.array([[True, True, False], [False, True, True]])
        mask = DomainMask(inside, 1.0, (0.0, 0.0))
        self.assertEqual(geodesic_distance(mask, (0.0, 0.0), (2.0, 1.0)).distance, 3.0)
        field = geodesic_field(mask, [(0.0, 0.0)])
        self.assertTrue(np.isinf(field[1, 0]))

    def test_interior_ball_radius(self):
        plane = make_plane(square_extent(4.0), 0.5)
        self.assertEqual(interior_ball_radius(plane), 4.0)
        exterior = make_exterior(2.0, square_extent(6.0), 0.25)
        self.assertGreater(interior_ball_radius(exterior), 0.0)

    def test_hypothesis_holds_on_plane(self):
        mask = make_plane((-2.0, 30.0, -6.0, 6.0), 0.5)
        result = check_hypothesis_Hyz(mask, (1.0, 0.0), (0.0, 3.0), (0.0, -3.0), 1.0, 1.0,
                                      np.linspace(0.0, 25.0, 6))
        self.assertTrue(result.satisfied)
        self.assertEqual(len(result.samples), 6)
        self.assertIsNone(result.witness)


EXTERIOR = make_exterior(1.5, square_extent(4.0), 0.5)
CYLINDER = make_half_cylinder((1.0, 0.0), 0.0, (0.0, 0.0), 1.0, (-2.0, 20.0, -6.0, 6.0), 0.5)
node = st.integers(min_value=0, max_value=EXTERIOR.inside_points.shape[0] - 1)


class TestMetricProperties(unittest.TestCase):
    @given(node, node, node)
    @settings(max_examples=25, deadline=None)
    def test_geodesic_symmetry_and_triangle_inequality(self, a, b, c):
        x, y, z = (EXTERIOR.inside_points[k] for k in (a, b, c))
        xy = geodesic_distance(EXTERIOR, x, y).distance
        yx = geodesic_distance(EXTERIOR, y, x).distance
        self.assertAlmostEqual(xy, yx, places=9)
        xz = geodesic_distance(EXTERIOR, x, z).distance
        yz = geodesic_distance(EXTERIOR, y, z).distance
        self.assertLessEqual(xz, xy + yz + 1e-9)
        self.assertGreaterEqual(xy, math.hypot(*(x - y)) - 1e-9)

    @given(st.floats(min_value=-5.5, max_value=5.5))
    @settings(max_examples=25, deadline=None)
    def test_tube_radius_moves_at_most_with_transverse_offset(self, t):
        h = CYLINDER.h
        base = compute_R(CYLINDER, DirectionQuery.of((1.0, 0.0)))
        q = DirectionQuery.of((1.0, 0.0), (0.0, t))
        R = compute_R(CYLINDER, q)
        offset = q.transverse()
        self.assertLessEqual(abs(base - offset), R + 2 * h)
        self.assertLessEqual(R, base + offset + 2 * h)

    def test_tube_radius_ignores_shifts_along_direction(self):
        plane = make_plane(square_extent(6.0), 0.5)
        for s in (-4.0, -1.0, 0.0, 2.0, 5.0):
            self.assertEqual(compute_R(plane, DirectionQuery.of((1.0, 0.0), (s, 1.0))), 0.0)
        for t in (2.0, 4.0):
            expected = compute_R(CYLINDER, DirectionQuery.of((1.0, 0.0), (0.0, t)))
            for s in (-1.0, 3.0, 6.0):
                with self.subTest(t=t, s=s):
                    self.assertEqual(compute_R(CYLINDER, DirectionQuery.of((1.0, 0.0), (s, t))), expected)



if __name__ == "__main__":
    unittest.main()
