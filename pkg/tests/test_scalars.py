"""
Tests for the exact scalar tower: rationals, cyclotomic fields and
eps-regulated Laurent values.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.scalars import Cyclotomic, EpsLaurent, is_rational_scalar, scalar_to_str, to_fraction


# ---------------------------------------------------------------------------
# Tests — Cyclotomic fields
# ---------------------------------------------------------------------------

class TestCyclotomic:
    def test_fourth_root_squares_to_minus_one(self):
        i = Cyclotomic.root(4)
        assert i * i == -1

    def test_cube_roots_sum_to_zero(self):
        """1 + zeta_3 + zeta_3^2 = 0"""
        total = Cyclotomic.root(3, 0) + Cyclotomic.root(3, 1) + Cyclotomic.root(3, 2)
        assert total == 0
        assert not total

    def test_power_wraps_around_order(self):
        assert Cyclotomic.root(4) ** 4 == 1
        assert Cyclotomic.root(4, 5) == Cyclotomic.root(4, 1)

    def test_inverse(self):
        x = Cyclotomic(4, [1, 2])
        assert x * x.inverse() == 1
        assert x / x == 1

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            Cyclotomic(4, [0]).inverse()

    def test_mixed_orders_rejected(self):
        with pytest.raises(ValueError):
            Cyclotomic.root(4) + Cyclotomic.root(3)

    def test_rational_detection(self):
        assert Cyclotomic.rational(4, Fraction(3, 2)).is_rational()
        assert not Cyclotomic.root(4).is_rational()
        assert Cyclotomic.rational(4, Fraction(3, 2)).to_fraction() == Fraction(3, 2)


# ---------------------------------------------------------------------------
# Tests — eps-regulated values
# ---------------------------------------------------------------------------

class TestEpsLaurent:
    def test_eps_times_inverse(self):
        eps = EpsLaurent.eps(4)
        assert eps * (1 / eps) == 1

    def test_inverse_of_one_plus_eps(self):
        """1/(1 + eps) = 1 - eps + eps^2 - eps^3 + O(eps^4)"""
        value = EpsLaurent({0: 1, 1: 1}, 4).inverse()
        assert value.terms == {0: 1, 1: -1, 2: 1, 3: -1}

    def test_pole_order_and_finite_part(self):
        value = EpsLaurent({-2: 1, 0: Fraction(5, 3)}, 3)
        assert value.pole_order() == 2
        assert value.finite_part() == Fraction(5, 3)

    def test_precision_tracks_products(self):
        eps = EpsLaurent.eps(3)
        assert (eps * eps).prec == 4


# ---------------------------------------------------------------------------
# Tests — Conversions
# ---------------------------------------------------------------------------

class TestConversions:
    def test_to_fraction_accepts_sympy(self):
        assert to_fraction(sp.Rational(-7, 3)) == Fraction(-7, 3)
        assert to_fraction(5) == Fraction(5)

    def test_to_fraction_rejects_irrational_cyclotomic(self):
        with pytest.raises(TypeError):
            to_fraction(Cyclotomic.root(4))

    def test_scalar_strings_are_exact(self):
        assert scalar_to_str(Fraction(1, 4)) == "1/4"
        assert scalar_to_str(3) == "3/1"
        assert scalar_to_str(Cyclotomic.rational(4, Fraction(-1, 2))) == "-1/2"
        assert scalar_to_str(Cyclotomic.root(4)) == "[0/1, 1/1]_zeta4"

    def test_is_rational_scalar(self):
        assert is_rational_scalar(Fraction(1, 3))
        assert not is_rational_scalar(Cyclotomic.root(4))
