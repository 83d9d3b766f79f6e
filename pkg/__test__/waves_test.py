import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import math
import tempfile
import unittest

import numpy as np

from spreading.params import Determinacy, KineticParams, alhasanat_ou_conditions, kanon_bounds, linear_speed
from spreading.waves import (
    SUBCRITICAL,
    WaveProfile,
    front_speed_from_pde,
    kpp_scalar_connects,
    level_crossing,
    random_parameter_sweep,
    strip_mask,
    sweep_wave_speeds,
    wave_residual,
    wave_speed_report,
)

P0 = KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.5)

# strong resident competition, including a2 > 2
STRONG_SETS = [(0.95, 1.5), (0.95, 3.0), (0.8, 2.0), (0.5, 3.0), (0.9, 5.0), (0.2, 5.0)]


class TestScalarFront(unittest.TestCase):
    def test_supercritical_speed_connects(self):
        self.assertTrue(kpp_scalar_connects(2.5, 1.0, 1.0))
        self.assertTrue(kpp_scalar_connects(3.0, 2.0, 1.0))

    def test_subcritical_speed_fails(self):
        self.assertFalse(kpp_scalar_connects(1.5, 1.0, 1.0))
        self.assertFalse(kpp_scalar_connects(-1.0, 1.0, 1.0))


class TestShooting(unittest.TestCase):
    def test_below_linear_speed_is_subcritical(self):
        result = wave_residual(1.0, P0)
        self.assertEqual(result.mode, SUBCRITICAL)
        self.assertFalse(result.connects)

    def test_nonpositive_speed(self):
        with self.assertRaises(ValueError):
            wave_residual(0.0, P0)

    def test_fast_front_is_monotone(self):
        result = wave_residual(1.9, P0)
        self.assertTrue(result.connects)
        profile = result.profile
        self.assertTrue(profile.is_monotone(slack=1e-8))
        self.assertLess(profile.phi[0], 1e-2)
        self.assertGreater(profile.psi[0], 0.99)

    def test_minimal_speed_is_linear_for_weak_competition(self):
        report = wave_speed_report(P0, tol=1e-3)
        self.assertAlmostEqual(report.c_star, math.sqrt(2.0), delta=5e-3)
        self.assertEqual(report.bound_check, "pass")
        lower, upper = kanon_bounds(P0)
        self.assertGreaterEqual(report.c_star, lower - 1e-3)
        self.assertLessEqual(report.c_star, upper + 1e-3)
        self.assertTrue(report.scan[-1][1])

    def test_fast_fronts_connect_under_strong_competition(self):
        for a1, a2 in STRONG_SETS:
            with self.subTest(a1=a1, a2=a2):
                result = wave_residual(2.1, KineticParams(1.0, 1.0, 1.0, 1.0, a1, a2))
                self.assertTrue(result.connects, result.mode)
                self.assertTrue(result.profile.is_monotone(slack=1e-8))

    def test_minimal_speed_within_kanon_bounds(self):
        sets = [
            KineticParams(1.0, 1.0, 1.0, 1.0, 0.8, 2.0),
            KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 3.0),
            KineticParams(1.0, 2.0, 1.0, 1.0, 0.3, 2.5),
            KineticParams(1.0, 1.0, 1.0, 1.0, 0.95, 1.5),
        ]
        for p in sets:
            with self.subTest(a1=p.a1, a2=p.a2, d2=p.d2):
                report = wave_speed_report(p, tol=1e-3)
                lower, upper = kanon_bounds(p)
                self.assertGreaterEqual(report.c_star, lower - 1e-3)
                self.assertLessEqual(report.c_star, upper + 1e-3)
                self.assertTrue(wave_residual(report.bracket[1], p).connects)

    def test_strong_resident_makes_speed_nonlinear(self):
        p = KineticParams(1.0, 1.0, 1.0, 1.0, 0.95, 5.0)
        self.assertEqual(alhasanat_ou_conditions(p), Determinacy.NONLINEAR)
        report = wave_speed_report(p, tol=1e-3)
        self.assertGreater(report.c_star, linear_speed(p) + 2e-3)
        self.assertLessEqual(report.c_star, kanon_bounds(p)[1] + 1e-3)

    def test_linear_determinacy_with_large_a2(self):
        p = KineticParams(1.0, 1.0, 1.0, 1.0, 0.2, 3.0)
        report = wave_speed_report(p, tol=1e-3)
        self.assertLessEqual(abs(report.c_star - linear_speed(p)), 5e-3)


class TestSweep(unittest.TestCase):
    def test_draws_are_reproducible(self):
        a = random_parameter_sweep(4, seed=3)
        b = random_parameter_sweep(4, seed=3)
        self.assertEqual(a, b)
        for p in a:
            self.assertLess(p.a1, 1.0)
            self.assertGreater(p.a2, 1.0)

    def test_rows_keep_input_order(self):
        rows = sweep_wave_speeds([P0])
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertEqual(row["d1"], 1.0)
        self.assertTrue(row["llw"])
        for key in ("lower", "upper", "c_star", "bound_check", "determinacy", "error"):
            self.assertIn(key, row)

    def test_random_draws_pass_bound_check(self):
        rows = sweep_wave_speeds(random_parameter_sweep(4, seed=0))
        for row in rows:
            self.assertEqual(row["bound_check"], "pass", row["error"])
            self.assertLessEqual(row["lower"] - 1e-3, row["c_star"])
            self.assertLessEqual(row["c_star"], row["upper"] + 1e-3)


class TestProfiles(unittest.TestCase):
    def test_profile_monotonicity_and_csv(self):
        xi = np.linspace(0.0, 1.0, 5)
        profile = WaveProfile(xi, xi, 1.0 - xi, 1.5)
        self.assertTrue(profile.is_monotone())
        self.assertFalse(WaveProfile(xi, xi[::-1], 1.0 - xi, 1.5).is_monotone())
        with tempfile.TemporaryDirectory() as tmp:
            path = profile.to_csv(os.path.join(tmp, "profile.csv"))
            lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "xi,phi,psi")
        self.assertEqual(len(lines), 6)


class TestPdeFront(unittest.TestCase):
    def test_level_crossing(self):
        xs = np.arange(5.0)
        self.assertAlmostEqual(level_crossing(np.array([1.0, 1.0, 0.6, 0.2, 0.0]), xs), 2.25)
        self.assertEqual(level_crossing(np.zeros(5), xs), float("-inf"))
        self.assertEqual(level_crossing(np.ones(5), xs), 4.0)

    def test_strip_mask(self):
        mask = strip_mask(0.0, 10.0, 0.5)
        self.assertEqual(mask.shape, (1, 21))
        self.assertEqual(mask.inside_count, 21)

    def test_front_moves_near_linear_speed(self):
        front = front_speed_from_pde(P0, horizon=40.0)
        self.assertGreater(front.speed, 1.2)
        self.assertLess(front.speed, 1.55)
        self.assertEqual(front.times.size, front.positions.size)


if __name__ == "__main__":
    unittest.main()
