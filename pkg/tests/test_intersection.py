"""
Tests for psi-class intersection numbers and genus <= 2 Hodge integrals.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.intersection import (
    double_factorial,
    hodge_integral,
    hodge_table_entries,
    multinomial,
    psi_intersection,
    reduce_lambda_monomial,
)


# ---------------------------------------------------------------------------
# Tests — Helpers
# ---------------------------------------------------------------------------

class TestHelpers:
    def test_double_factorial(self):
        assert double_factorial(-1) == 1
        assert double_factorial(5) == 15
        assert double_factorial(6) == 48

    def test_multinomial(self):
        assert multinomial(4, (2, 2)) == 6
        assert multinomial(3, (2, 2)) == 0


# ---------------------------------------------------------------------------
# Tests — psi intersections
# ---------------------------------------------------------------------------

class TestPsiIntersection:
    @pytest.mark.parametrize("g, exponents, expected", [
        (0, [0, 0, 0], Fraction(1)),
        (0, [2, 0, 0, 0, 0], Fraction(1)),
        (0, [1, 1, 0, 0, 0], Fraction(2)),
        (1, [1], Fraction(1, 24)),
        (1, [1, 1], Fraction(1, 24)),
        (2, [4], Fraction(1, 1152)),
        (2, [3, 2], Fraction(29, 5760)),
        (2, [2, 2, 2], Fraction(7, 240)),
    ])
    def test_known_values(self, g, exponents, expected):
        assert psi_intersection(g, exponents) == expected

    def test_order_of_exponents_irrelevant(self):
        assert psi_intersection(2, [2, 3]) == psi_intersection(2, [3, 2])

    def test_off_dimension_is_zero(self):
        assert psi_intersection(1, [2]) == 0

    def test_unstable_is_zero(self):
        assert psi_intersection(0, [0, 0]) == 0


# ---------------------------------------------------------------------------
# Tests — Hodge integrals
# ---------------------------------------------------------------------------

class TestHodgeIntegrals:
    def test_lambda_relations(self):
        assert reduce_lambda_monomial(2, (2, 0)) == {(0, 1): Fraction(2)}
        assert reduce_lambda_monomial(2, (0, 2)) == {}
        assert reduce_lambda_monomial(1, (2,)) == {}
        assert reduce_lambda_monomial(0, ()) == {(): Fraction(1)}

    @pytest.mark.parametrize("g, lam, psi, expected", [
        (1, (1,), (0,), Fraction(1, 24)),
        (2, (1, 1), (), Fraction(1, 5760)),
        (2, (0, 1), (2,), Fraction(7, 5760)),
        (2, (1, 0), (3,), Fraction(1, 480)),
        (2, (3, 0), (), Fraction(1, 2880)),
        (2, (2, 0), (2,), Fraction(7, 2880)),
    ])
    def test_known_values(self, g, lam, psi, expected):
        assert hodge_integral(g, lam, psi) == expected

    def test_vanishing_lambda_square(self):
        assert hodge_integral(2, (0, 2), (1,)) == 0

    def test_genus_three_rejected(self):
        with pytest.raises(ValueError):
            hodge_integral(3, (1, 0, 0), (5,))

    def test_table_entries(self):
        entries = hodge_table_entries(max_genus=2, max_markings=3)
        assert entries[(2, (1, 0), (3,))] == Fraction(1, 480)
        assert entries[(0, (), (0, 0, 0))] == 1
        assert all(len(psi) <= 3 for (_, _, psi) in entries)
        assert (0, (), (0, 0)) not in entries
