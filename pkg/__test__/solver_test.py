import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import tempfile
import unittest

import numpy as np

from spreading.domain import make_exterior, make_plane, square_extent
from spreading.errors import BoundViolationError, ConfigError
from spreading.params import KineticParams
from spreading.solver import (
    InitialCondition,
    Probe,
    SolverConfig,
    StatePair,
    bump_initial,
    comparison_test,
    evolve,
    make_scheme,
    random_nested_pair,
    step,
    step_initial,
)

P0 = KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.5)


class TestInitialData(unittest.TestCase):
    def setUp(self):
        self.mask = make_exterior(1.0, square_extent(5.0), 0.5)

    def test_bump(self):
        initial = bump_initial(self.mask, (3.0, 0.0), 1.5)
        initial.validate(self.mask)
        self.assertEqual(initial.u0[self.mask.cell_of((3.0, 0.0))], 1.0)
        self.assertEqual(initial.u0[self.mask.cell_of((-3.0, 0.0))], 0.0)
        self.assertEqual(initial.v0[self.mask.cell_of((-3.0, 0.0))], 1.0)
        with self.assertRaises(ValueError):
            bump_initial(self.mask, (3.0, 0.0), 1.5, amplitude=0.0)

    def test_step(self):
        initial = step_initial(self.mask, -2.0)
        initial.validate(self.mask)
        self.assertEqual(initial.u0[self.mask.cell_of((-4.0, 0.0))], 1.0)
        self.assertEqual(initial.v0[self.mask.cell_of((-4.0, 0.0))], 0.0)
        self.assertEqual(initial.v0[self.mask.cell_of((4.0, 0.0))], 1.0)

    def test_invalid_data(self):
        zeros = np.zeros(self.mask.shape)
        ones = np.where(self.mask.inside, 1.0, 0.0)
        with self.assertRaises(ValueError):
            InitialCondition(zeros, ones).validate(self.mask)
        with self.assertRaises(ValueError):
            InitialCondition(np.zeros((2, 2)), np.zeros((2, 2))).validate(self.mask)
        u0 = np.where(self.mask.inside, 0.5, 0.0)
        with self.assertRaises(ValueError):
            InitialCondition(u0, ones, support_cells=np.zeros(self.mask.shape, dtype=bool)).validate(self.mask)
        with self.assertRaises(BoundViolationError):
            InitialCondition(np.where(self.mask.inside, 1.5, 0.0), ones).validate(self.mask)

    def test_random_pairs_are_nested(self):
        rng = np.random.default_rng(11)
        inside = self.mask.inside
        for _ in range(5):
            low, high = random_nested_pair(self.mask, rng)
            low.validate(self.mask)
            high.validate(self.mask)
            self.assertTrue(np.all(low.u0[inside] <= high.u0[inside]))
            self.assertTrue(np.all(low.v0[inside] >= high.v0[inside]))


class TestSolverConfig(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ConfigError):
            SolverConfig(cfl_safety=1.5)
        with self.assertRaises(ConfigError):
            SolverConfig(snapshot_every=0.0)
        with self.assertRaises(ConfigError):
            SolverConfig(horizon=-1.0)
        with self.assertRaises(ConfigError) as ctx:
            SolverConfig(dt=0.0)
        self.assertIn("solver.dt", str(ctx.exception))

    def test_dt_above_bound(self):
        mask = make_plane(square_extent(2.0), 0.5)
        with self.assertRaises(ConfigError):
            make_scheme(mask, P0, SolverConfig(dt=0.5))


class TestEvolve(unittest.TestCase):
    def setUp(self):
        self.mask = make_plane(square_extent(5.0), 0.5)
        self.initial = bump_initial(self.mask, (0.0, 0.0), 1.0)
        self.config = SolverConfig(horizon=2.0, snapshot_every=0.5)

    def test_snapshot_times_are_exact(self):
        run = evolve(self.initial, self.mask, P0, self.config)
        self.assertEqual(run.times, [0.0, 0.5, 1.0, 1.5, 2.0])
        self.assertEqual(len(run.snapshots), 5)
        self.assertEqual(run.steps % 4, 0)
        self.assertAlmostEqual(run.dt * run.steps, 2.0, places=12)
        self.assertLessEqual(run.dt, 0.9 / 18.5)

    def test_horizon_off_cadence_ends_on_horizon(self):
        run = evolve(self.initial, self.mask, P0, SolverConfig(horizon=1.3, snapshot_every=0.5))
        self.assertEqual(run.times, [0.0, 0.5, 1.0, 1.3])
        self.assertEqual(run.snapshots[-1].t, 1.3)
        short = evolve(self.initial, self.mask, P0, SolverConfig(horizon=0.2, snapshot_every=0.5))
        self.assertEqual(short.times, [0.0, 0.2])

    def test_resident_declines_and_fields_stay_bounded(self):
        run = evolve(self.initial, self.mask, P0, self.config)
        inside = self.mask.inside
        first, last = run.snapshot(0), run.final
        self.assertLess(last.v[inside].sum(), first.v[inside].sum())
        for snap in run.iter_snapshots():
            self.assertGreaterEqual(snap.u[inside].min(), -1e-12)
            self.assertLessEqual(snap.v[inside].max(), 1.0 + 1e-12)

    def test_probes(self):
        probes = [Probe("center", (0.0, 0.0)), Probe("far", (4.0, 4.0), "v")]
        run = evolve(self.initial, self.mask, P0, self.config, probes=probes)
        t, values = run.probe_series("center")
        self.assertEqual(t.tolist(), run.times)
        self.assertEqual(values[0], 1.0)
        _, far = run.probe_series("far")
        self.assertEqual(far[0], 1.0)
        with tempfile.TemporaryDirectory() as tmp:
            path = run.write_probes_csv(os.path.join(tmp, "probes.csv"))
            self.assertEqual(len(path.read_text().splitlines()), 1 + 2 * 5)

    def test_probe_outside_mask(self):
        mask = make_exterior(1.0, square_extent(5.0), 0.5)
        initial = bump_initial(mask, (3.0, 0.0), 1.0)
        with self.assertRaises(ValueError):
            evolve(initial, mask, P0, self.config, probes=[Probe("hole", (0.0, 0.0))])

    def test_disk_run_matches_memory_run(self):
        in_memory = evolve(self.initial, self.mask, P0, self.config)
        with tempfile.TemporaryDirectory() as tmp:
            on_disk = evolve(self.initial, self.mask, P0, self.config, output_dir=tmp, keep_in_memory=False)
            self.assertEqual(on_disk.snapshots, [])
            self.assertEqual(len(on_disk.snapshot_paths), 5)
            self.assertEqual(on_disk.final.u.tobytes(), in_memory.final.u.tobytes())
            self.assertEqual(on_disk.final.v.tobytes(), in_memory.final.v.tobytes())

    def test_zero_horizon(self):
        run = evolve(self.initial, self.mask, P0, SolverConfig(horizon=0.0))
        self.assertEqual(run.times, [0.0])
        self.assertEqual(run.steps, 0)

    def test_edge_contacts(self):
        mask = make_plane(square_extent(15.0), 0.5)
        initial = bump_initial(mask, (0.0, 0.0), 2.0)
        run = evolve(initial, mask, P0, SolverConfig(horizon=10.0, snapshot_every=1.0))
        self.assertEqual(set(run.edge_contacts), {"xmin", "xmax", "ymin", "ymax"})

    def test_imex_run(self):
        run = evolve(self.initial, self.mask, P0, SolverConfig(scheme="imex", dt=0.1, horizon=1.0, snapshot_every=0.5))
        self.assertEqual(run.times, [0.0, 0.5, 1.0])
        self.assertAlmostEqual(run.dt, 0.1)


class TestStep(unittest.TestCase):
    def test_single_step(self):
        mask = make_plane(square_extent(2.0), 0.5)
        state = bump_initial(mask, (0.0, 0.0), 1.0).state(mask)
        advanced = step(state, mask, P0, SolverConfig())
        self.assertAlmostEqual(advanced.t, 0.9 / 18.5)

    def test_bound_violation(self):
        mask = make_plane(square_extent(1.0), 0.5)
        bad = StatePair(np.full(mask.shape, 0.5), np.full(mask.shape, 1.0 + 1e-6), 3.0)
        with self.assertRaises(BoundViolationError):
            bad.check_bounds(mask)


class TestComparison(unittest.TestCase):
    def test_ordered_data_stay_ordered(self):
        mask = make_exterior(1.0, square_extent(5.0), 0.5)
        low, high = random_nested_pair(mask, np.random.default_rng(7))
        verdict = comparison_test(low, high, mask, P0, SolverConfig(horizon=2.0, snapshot_every=0.5))
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.snapshots_checked, 5)
        self.assertLessEqual(verdict.max_violation, 1e-10)

    def test_unordered_data_rejected(self):
        mask = make_plane(square_extent(2.0), 0.5)
        low, high = random_nested_pair(mask, np.random.default_rng(8))
        with self.assertRaises(ValueError):
            comparison_test(high, low, mask, P0, SolverConfig(horizon=1.0))


if __name__ == "__main__":
    unittest.main()
