"""
Tests for asymptotic extraction, the R-recursions, the X-relation and
ring-membership fits.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.asymptotics import (
    LOW_ORDER,
    NormalizationError,
    a2_and_chi,
    closed_form_r,
    d_l,
    drule_residual,
    extract_asymptotics,
    fit_laurent,
    ring_closure_check,
    structure_check,
    tower_asymptotics,
    verify_r_recursion,
)
from src.birkhoff import build_s_tower
from src.geometry import Geometry, base_series, i_twisted_p3, l_series
from src.series import laurent_value

ORDER = 4
Z_DEPTH = 5


@pytest.fixture(scope="module")
def towers():
    infinity = build_s_tower(i_twisted_p3(ORDER, 5))
    origin = build_s_tower(i_twisted_p3(ORDER, ORDER + Z_DEPTH + 1, "origin"), c_series=infinity.c)
    return infinity, origin


@pytest.fixture(scope="module")
def expansions(towers):
    _, origin = towers
    L = l_series(ORDER)
    return {p: tower_asymptotics(origin, p, Z_DEPTH, L) for p in origin.stages[0].points()}


# ---------------------------------------------------------------------------
# Tests — Closed forms
# ---------------------------------------------------------------------------

class TestClosedForms:
    def test_r0_is_root_of_l(self, expansions):
        r0, _ = closed_form_r(l_series(ORDER))
        for exp in expansions.values():
            assert (exp.r(0, 0) - r0).is_zero()

    def test_r1_closed_form(self, expansions):
        _, r1 = closed_form_r(l_series(ORDER))
        for exp in expansions.values():
            assert (exp.r(0, 1) - r1).is_zero()

    def test_mu_derivative(self, expansions):
        """1 + D mu = L at every fixed point"""
        L = l_series(ORDER)
        for exp in expansions.values():
            assert (exp.mu.d_op() + 1 - L).is_zero()

    def test_rows_start_with_one(self, expansions):
        for exp in expansions.values():
            for k in range(4):
                assert exp.r(k, 0).constant_term() == 1

    def test_single_family_extraction_matches_tower(self, expansions):
        fam = i_twisted_p3(ORDER, ORDER + Z_DEPTH + 1, "origin")
        direct = extract_asymptotics(fam, (1,), Z_DEPTH)
        assert (direct.r(0, 2) - expansions[(1,)].r(0, 2)).is_zero()

    def test_infinity_expansion_rejected(self):
        with pytest.raises(NormalizationError, match="not asymptotically normalizable"):
            extract_asymptotics(i_twisted_p3(2, 4), (0,), 2)


# ---------------------------------------------------------------------------
# Tests — Recursions
# ---------------------------------------------------------------------------

class TestRecursions:
    def test_r_recursion(self, expansions):
        L = l_series(ORDER)
        for exp in expansions.values():
            residuals = verify_r_recursion(exp, L, 3)
            failing = [k for k, r in residuals.items() if not r.is_zero()]
            assert failing == [], f"nonzero residuals at {exp.point}: {failing}"

    def test_x_relation(self):
        series = base_series(Geometry.twisted_p3(), 8)
        assert drule_residual(series["X"], series["L"]).is_zero()

    def test_a2_matches_base_series(self, towers):
        infinity, _ = towers
        L = l_series(ORDER)
        X, A2 = a2_and_chi(infinity.c[1], L)
        series = base_series(Geometry.twisted_p3(), ORDER)
        assert (A2 - series["A2"]).is_zero()
        assert A2.constant_term() == Fraction(1, 4)

    def test_d_of_l(self):
        L = l_series(8)
        assert (d_l(L) - L.d_op()).is_zero()


# ---------------------------------------------------------------------------
# Tests — Ring membership
# ---------------------------------------------------------------------------

class TestStructure:
    def test_laurent_fit(self):
        L = l_series(10)
        entry = fit_laurent(L ** 2 * 3 - L.inverse(), L, (-1, 3), margin=5)
        assert entry["ok"]
        assert entry["coefficients"] == {2: Fraction(3), -1: Fraction(-1)}
        assert laurent_value(entry["coefficients"], L) == L ** 2 * 3 - L.inverse()

    def test_low_order_is_reported(self, expansions):
        series = base_series(Geometry.twisted_p3(), ORDER)
        report = structure_check(expansions[(0,)], series["L"], series["X"], 1)
        assert report["R00"]["status"] == LOW_ORDER
        assert not report["R00"]["ok"]

    def test_derivative_closes_on_ring(self):
        series = base_series(Geometry.twisted_p3(), 16)
        entry = ring_closure_check({(1, 0): Fraction(1)}, series["L"], series["X"])
        assert entry["ok"]
        assert entry["coefficients"] == {(5, 0): Fraction(1, 4), (1, 0): Fraction(-1, 4)}
