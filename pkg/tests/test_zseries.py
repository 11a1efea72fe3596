"""
Tests for z-expansions at z = infinity and z = 0.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.series import NonNormalizedError, q_series
from src.zseries import InfinityExpansion, OriginExpansion


# ---------------------------------------------------------------------------
# Tests — z = infinity
# ---------------------------------------------------------------------------

class TestInfinityExpansion:
    def test_simple_pole(self):
        """1/(1 + z) = 1/z - 1/z^2 + 1/z^3 - ..."""
        exp = InfinityExpansion.from_terms({(0,): ([], [(1, 1)])}, ("q",), (0,), 4)
        assert exp.shift == -1
        assert exp.z_coefficient(-1).constant_term() == 1
        assert exp.z_coefficient(-2).constant_term() == -1
        assert exp.z_coefficient(0).is_zero()

    def test_mixed_degrees_align(self):
        """1 + q z"""
        terms = {(0,): ([], []), (1,): ([(0, 1)], [])}
        exp = InfinityExpansion.from_terms(terms, ("q",), (1,), 3)
        assert exp.shift == 1
        assert exp.z_coefficient(1).coefficients() == [0, 1]
        assert exp.z_coefficient(0).coefficients() == [1, 0]

    def test_inverse_z_series(self):
        exp = InfinityExpansion.from_terms({(0,): ([], [(1, 1)])}, ("q",), (0,), 4)
        series = exp.inverse_z_series("w")
        assert series.coefficient(0, 1) == 1
        assert series.coefficient(0, 2) == -1

    def test_positive_z_power_is_not_normalized(self):
        exp = InfinityExpansion.from_terms({(1,): ([(0, 1)], [])}, ("q",), (1,), 2)
        with pytest.raises(NonNormalizedError):
            exp.inverse_z_series("w")

    def test_theta_applies_weight_and_derivative(self):
        """(xi + z q d/dq) q = xi q + z q"""
        exp = InfinityExpansion.from_terms({(1,): ([], [])}, ("q",), (1,), 2)
        out = exp.theta(Fraction(3), "q")
        assert out.z_coefficient(1).coefficients() == [0, 1]
        assert out.z_coefficient(0).coefficients() == [0, 3]


# ---------------------------------------------------------------------------
# Tests — z = 0
# ---------------------------------------------------------------------------

class TestOriginExpansion:
    def test_regular_term(self):
        """1/(1 + z) at q^0 gives 1 - z + z^2"""
        exp = OriginExpansion.from_terms({0: ([], [(1, 1)])}, 0, 2)
        assert exp.z_coefficient(0).constant_term() == 1
        assert exp.z_coefficient(1).constant_term() == -1
        assert exp.z_coefficient(2).constant_term() == 1

    def test_pole_within_degree(self):
        """q / z is stored as u^1 z^0"""
        exp = OriginExpansion.from_terms({0: ([], []), 1: ([], [(0, 1)])}, 1, 2)
        assert exp.min_z_power() == -1
        assert exp.z_coefficient(-1).coefficients() == [0, 1]

    def test_pole_beyond_degree_rejected(self):
        with pytest.raises(ValueError):
            OriginExpansion.from_terms({0: ([], [(0, 1)])}, 0, 2)

    def test_coefficients_stay_exact(self):
        exp = OriginExpansion.from_terms({0: ([(2, 1)], [(3, 1)])}, 0, 3)
        assert exp.z_coefficient(0).constant_term() == Fraction(2, 3)
        assert isinstance(exp.z_coefficient(1).constant_term(), Fraction)

    def test_from_z_inverse_needs_zero_constant(self):
        with pytest.raises(NonNormalizedError):
            OriginExpansion.from_z_inverse(q_series([1, 1], 2), 3)

    def test_q_z_series(self):
        c = q_series([1, 2, 3], 2)
        series = OriginExpansion.from_q_series(c, 4).q_z_series(2)
        assert series.variables == ("q", "z")
        assert series.coefficient(1, 0) == 2
        assert series.coefficient(2, 0) == 3
