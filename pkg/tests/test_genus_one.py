"""
Tests for genus-one vertex data, the Vert/Loop assembly and the closed-form
right-hand sides.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.geometry import Geometry, l_series
from src.genus_one import (
    GENERAL_FORM,
    PRINTED_FORM,
    DegenerateBranchError,
    closed_form_rhs,
    expected_loop,
    expected_vert,
    g1_compare,
    ode_vertex_data,
    solve_eikonal,
    quadric_constant,
    vertex_data,
)
from src.series import TruncSeries

ORDER = 3


@pytest.fixture(scope="module")
def report():
    return g1_compare(Geometry.hypersurface(2, 2, regulator=(1, 2)), ORDER)


# ---------------------------------------------------------------------------
# Tests — Closed forms
# ---------------------------------------------------------------------------

class TestClosedForms:
    @pytest.mark.parametrize("n, expected", [
        (2, Fraction(2, 3)),
        (3, Fraction(2)),
        (4, Fraction(14, 3)),
    ])
    def test_quadric_constant(self, n, expected):
        assert quadric_constant(n) == expected

    def test_printed_form(self):
        rhs = closed_form_rhs(PRINTED_FORM, 2, 2, ORDER)
        assert rhs.coefficients() == [Fraction(-2, 3), Fraction(-8, 3), Fraction(-32, 3), Fraction(-128, 3)]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_general_form_for_quadrics(self, n):
        c = quadric_constant(n)
        rhs = closed_form_rhs(GENERAL_FORM, 2, n, 5)
        assert rhs.coefficients() == [0] + [-c * 4 ** (d - 1) for d in range(1, 6)]

    def test_printed_form_needs_quadric(self):
        with pytest.raises(ValueError):
            closed_form_rhs(PRINTED_FORM, 3, 2, ORDER)

    def test_general_form_needs_c_series_for_cubics(self):
        with pytest.raises(ValueError):
            closed_form_rhs(GENERAL_FORM, 3, 3, ORDER)

    def test_quadric_loop_vanishes(self):
        assert expected_loop(2, 3, ORDER, None).is_zero()

    def test_quadric_vert(self):
        L = l_series(ORDER, 2, 4)
        assert expected_vert(2, 2, ORDER) == (L * L - 1) * Fraction(-1, 6)


# ---------------------------------------------------------------------------
# Tests — Vertex data
# ---------------------------------------------------------------------------

class TestVertexData:
    def test_eikonal_without_lambda(self):
        L = solve_eikonal(2, 2, 1, 0, ORDER)
        assert L.coefficients() == [1, 2, 6, 20]

    def test_eikonal_negative_root(self):
        L = solve_eikonal(2, 2, -1, 0, ORDER)
        assert L.coefficients() == [-1, -2, -6, -20]

    def test_degenerate_branch(self):
        with pytest.raises(DegenerateBranchError):
            solve_eikonal(2, 2, 0, 0, ORDER)

    def test_every_point_covered(self):
        geom = Geometry.hypersurface(2, 2, regulator=(1, 2))
        vd = vertex_data(geom, 2)
        assert set(vd.L) == {p.index for p in geom.points}

    def test_needs_hypersurface(self):
        with pytest.raises(ValueError):
            vertex_data(Geometry.from_dict({"geometry": "twisted-p3"}), 2)


# ---------------------------------------------------------------------------
# Tests — Assembly
# ---------------------------------------------------------------------------

class TestG1Compare:
    def test_residual_is_constant(self, report):
        assert report.passed
        assert report.residual - report.constant_offset == TruncSeries.zero(("q",), (ORDER,))

    def test_loop_vanishes(self, report):
        assert report.loop.is_zero()

    def test_total_matches_quadric_coefficients(self, report):
        c = quadric_constant(2)
        shifted = report.total - report.constant_offset
        assert shifted.coefficients()[1:] == [-c * 4 ** (d - 1) for d in range(1, ORDER + 1)]

    def test_printed_residual_kept(self, report):
        assert report.printed_residual is not None


class TestOdeRoute:
    def test_covers_every_point(self):
        geom = Geometry.hypersurface(2, 2)
        a, b = ode_vertex_data(geom, 2)
        assert set(a) == set(b) == {p.index for p in geom.points}
        assert all(series.constant_term() == 0 for series in a.values())

    def test_needs_quadric(self):
        with pytest.raises(ValueError):
            ode_vertex_data(Geometry.hypersurface(3, 2), 2)


class TestRegulatorIndependence:
    def test_total_independent_of_regulator(self, report):
        other = g1_compare(Geometry.hypersurface(2, 2, regulator=(1, 3)), ORDER)
        assert other.total == report.total
