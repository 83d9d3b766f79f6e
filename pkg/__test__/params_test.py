import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import math
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spreading.errors import DegenerateDenominatorError, ParameterError
from spreading.params import (
    Determinacy,
    KineticParams,
    alhasanat_ou_conditions,
    exterior_upper_bound,
    huang_condition,
    kanon_bounds,
    kpp_speed,
    linear_speed,
    llw_linear_determinacy,
)

P0 = KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.5)

rates = st.floats(min_value=0.05, max_value=20.0, allow_nan=False, allow_infinity=False)
monostable = st.builds(
    KineticParams,
    d1=rates, d2=rates, r1=rates, r2=rates,
    a1=st.floats(min_value=0.01, max_value=0.99),
    a2=st.floats(min_value=1.01, max_value=10.0),
)


class TestKineticParams(unittest.TestCase):
    def test_rejects_nonpositive_rate(self):
        with self.assertRaises(ParameterError):
            KineticParams(0.0, 1.0, 1.0, 1.0, 0.5, 1.5)
        with self.assertRaises(ParameterError):
            KineticParams(1.0, -1.0, 1.0, 1.0, 0.5, 1.5)

    def test_rejects_non_monostable_ordering(self):
        with self.assertRaises(ParameterError):
            KineticParams(1.0, 1.0, 1.0, 1.0, 1.0, 1.5)
        with self.assertRaises(ParameterError):
            KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.0)

    def test_rejects_non_numbers(self):
        with self.assertRaises(ParameterError):
            KineticParams(True, 1.0, 1.0, 1.0, 0.5, 1.5)
        with self.assertRaises(ParameterError):
            KineticParams(float("nan"), 1.0, 1.0, 1.0, 0.5, 1.5)

    def test_parameter_error_is_value_error(self):
        self.assertTrue(issubclass(ParameterError, ValueError))

    def test_from_dict(self):
        self.assertEqual(KineticParams.from_dict(P0.to_dict()), P0)
        with self.assertRaises(ParameterError):
            KineticParams.from_dict({"d1": 1.0})
        with self.assertRaises(ParameterError):
            KineticParams.from_dict(dict(P0.to_dict(), d3=1.0))

    def test_integers_are_stored_as_floats(self):
        p = KineticParams(1, 2, 1, 1, 0.5, 2)
        self.assertIsInstance(p.d2, float)


class TestClosedFormSpeeds(unittest.TestCase):
    def test_reference_values(self):
        self.assertAlmostEqual(linear_speed(P0), math.sqrt(2.0), places=12)
        self.assertAlmostEqual(kpp_speed(P0), 2.0, places=12)
        self.assertAlmostEqual(exterior_upper_bound(P0), 2.0, places=12)

    def test_exterior_bound_uses_resident_diffusion_when_large(self):
        p = KineticParams(1.0, 8.0, 1.0, 1.0, 0.5, 1.5)
        self.assertAlmostEqual(exterior_upper_bound(p), 2.0 * 2.0, places=12)

    @given(monostable)
    @settings(max_examples=200, deadline=None)
    def test_bounds_are_ordered(self, p):
        lower, upper = kanon_bounds(p)
        self.assertLess(lower, upper)
        self.assertGreaterEqual(exterior_upper_bound(p), upper * (1 - 1e-12))
        self.assertGreater(lower, 0.0)


class TestDeterminacy(unittest.TestCase):
    def test_llw_holds_for_weak_competition(self):
        self.assertTrue(llw_linear_determinacy(P0))

    def test_llw_fails_for_fast_resident(self):
        self.assertFalse(llw_linear_determinacy(KineticParams(1.0, 3.0, 1.0, 1.0, 0.5, 1.5)))

    def test_llw_growth_threshold(self):
        # a1 a2 = 1.6, threshold r1 (2 - 1)(1 - 0.8) / 0.6 = 1/3
        self.assertTrue(llw_linear_determinacy(KineticParams(1.0, 1.0, 1.0, 0.3, 0.8, 2.0)))
        self.assertFalse(llw_linear_determinacy(KineticParams(1.0, 1.0, 1.0, 0.5, 0.8, 2.0)))

    def test_huang_condition(self):
        self.assertTrue(huang_condition(KineticParams(1.0, 1.5, 1.0, 1.0, 0.5, 1.5)))
        with self.assertRaises(DegenerateDenominatorError):
            huang_condition(P0)

    def test_alhasanat_ou_classification(self):
        nonlinear = KineticParams(1.0, 1.0, 0.1, 1.0, 0.9, 2.0)
        linear = KineticParams(1.0, 1.0, 1.0, 0.1, 0.2, 2.0)
        self.assertEqual(alhasanat_ou_conditions(nonlinear), Determinacy.NONLINEAR)
        self.assertEqual(alhasanat_ou_conditions(linear), Determinacy.LINEAR)
        self.assertEqual(alhasanat_ou_conditions(P0), Determinacy.INCONCLUSIVE)

    @given(monostable)
    @settings(max_examples=200, deadline=None)
    def test_classification_never_conflicts(self, p):
        self.assertIn(alhasanat_ou_conditions(p), list(Determinacy))


if __name__ == "__main__":
    unittest.main()
