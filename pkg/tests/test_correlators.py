"""
Tests for the Hodge integral table, the t-expansion of correlators and
their reduction to P-functions.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.correlators import (
    HodgeIntegralTable,
    MissingHodgeIntegralError,
    evaluate_correlator,
    insertion_budget,
    markings_needed,
    reduce_correlator,
    s_series,
    two_point_residual,
)
from src.series import TruncSeries
from src.validation import CORRELATOR_DISPLAYS, TABLE_MARKINGS

VARS, ORDERS = ("x", "y"), (2, 2)


@pytest.fixture(scope="module")
def table():
    return HodgeIntegralTable.build_from_oracle(max_genus=2, max_markings=6)


@pytest.fixture
def t_values():
    """t_1 = 0, t_2 = x, t_3 = y"""
    return [
        TruncSeries.zero(VARS, ORDERS),
        TruncSeries.variable("x", VARS, ORDERS),
        TruncSeries.variable("y", VARS, ORDERS),
    ]


# ---------------------------------------------------------------------------
# Tests — Table
# ---------------------------------------------------------------------------

class TestHodgeIntegralTable:
    def test_lookup(self, table):
        assert table.integral(2, (1, 0), (3,)) == Fraction(1, 480)
        assert table.integral(2, (2, 0), (2,)) == Fraction(7, 2880)

    def test_off_dimension_is_zero(self, table):
        assert table.integral(1, (), (3,)) == 0

    def test_missing_entry(self):
        empty = HodgeIntegralTable({})
        with pytest.raises(MissingHodgeIntegralError) as exc:
            empty.integral(1, (), (1,))
        assert "(1, psi_1^1)" in str(exc.value)

    def test_save_and_load(self, tmp_path):
        small = HodgeIntegralTable.build_from_oracle(max_genus=1, max_markings=4)
        path = small.save(tmp_path / "hodge.csv")
        loaded = HodgeIntegralTable.load(path)
        assert loaded.entries == small.entries
        assert loaded.source == str(path)

    def test_load_keeps_lambda_exponents(self, tmp_path):
        small = HodgeIntegralTable.build_from_oracle(max_genus=2, max_markings=1)
        loaded = HodgeIntegralTable.load(small.save(tmp_path / "hodge.csv"))
        assert loaded.integral(2, (1, 0), (3,)) == Fraction(1, 480)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            HodgeIntegralTable.load(tmp_path / "absent.csv")

    def test_load_rejects_off_dimension_record(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("g;psi;lambda;n;value\n1;2;;1;1/24\n")
        with pytest.raises(ValueError):
            HodgeIntegralTable.load(path)

    def test_load_rejects_wrong_marking_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("g;psi;lambda;n;value\n0;0 0 0;;2;1/1\n")
        with pytest.raises(ValueError):
            HodgeIntegralTable.load(path)


# ---------------------------------------------------------------------------
# Tests — t-expansion
# ---------------------------------------------------------------------------

class TestExpansion:
    def test_insertion_budget(self):
        assert insertion_budget(1, (0,)) == 1
        assert insertion_budget(2, ()) == 3
        assert insertion_budget(2, (), (1, 0)) == 2

    def test_s_series(self, t_values):
        s = s_series(t_values, 2)
        x = TruncSeries.variable("x", VARS, ORDERS)
        y = TruncSeries.variable("y", VARS, ORDERS)
        assert s[0] == TruncSeries.constant(1, VARS, ORDERS)
        assert s[1] == x
        assert s[2] == y + x * x * 3

    def test_too_few_t_values(self, table, t_values):
        with pytest.raises(ValueError):
            evaluate_correlator(2, (), (), t_values[:2], table.integral)

    def test_two_point_closed_form(self):
        assert two_point_residual(4).is_zero()


# ---------------------------------------------------------------------------
# Tests — P-functions
# ---------------------------------------------------------------------------

class TestReduction:
    @pytest.mark.parametrize("g, psi, expected", [
        (0, (0, 0, 0), {(): (Fraction(1), 1)}),
        (0, (0, 0, 0, 0), {(1,): (Fraction(1), 0)}),
        (1, (0,), {(1,): (Fraction(1, 24), -1)}),
        (1, (0, 0), {(2,): (Fraction(1, 24), -1), (1, 1): (Fraction(-1, 24), -2)}),
        (2, (), {
            (3,): (Fraction(1, 1152), -2),
            (2, 1): (Fraction(-7, 1920), -3),
            (1, 1, 1): (Fraction(1, 360), -4),
        }),
    ])
    def test_known_p_functions(self, table, g, psi, expected):
        assert reduce_correlator(g, psi, (), table).terms == expected

    def test_expression(self, table):
        p = reduce_correlator(1, (0,), (), table)
        s0, s1 = p.symbols
        assert sp.simplify(p.expression - s1 / (24 * s0)) == 0

    def test_matches_direct_expansion(self, table, t_values):
        p = reduce_correlator(1, (0, 0), (), table)
        direct = evaluate_correlator(1, (0, 0), (), t_values, table.integral)
        assert p.evaluate(s_series(t_values, 2)) == direct

    def test_negative_budget(self, table):
        assert reduce_correlator(1, (2,), (), table).is_zero()

    def test_unstable_rejected(self, table):
        with pytest.raises(ValueError):
            reduce_correlator(0, (0, 0), (), table)

    def test_missing_integral_propagates(self):
        with pytest.raises(MissingHodgeIntegralError):
            reduce_correlator(1, (0,), (), HodgeIntegralTable({}))


# ---------------------------------------------------------------------------
# Tests — Table coverage for the anomaly suite
# ---------------------------------------------------------------------------

class TestTableCoverage:
    def test_markings_needed(self):
        assert markings_needed(0, (0,) * 6) == 9
        assert markings_needed(2, ()) == 3
        assert markings_needed(1, (2,)) == 1

    def test_default_markings_cover_displays(self):
        table = HodgeIntegralTable.build_from_oracle(max_markings=TABLE_MARKINGS)
        for (g, psi), expected in CORRELATOR_DISPLAYS.items():
            assert reduce_correlator(g, psi, (0,) * g, table).terms == expected

    def test_one_marking_short_fails(self):
        table = HodgeIntegralTable.build_from_oracle(max_markings=TABLE_MARKINGS - 1)
        with pytest.raises(MissingHodgeIntegralError):
            reduce_correlator(0, (0,) * 6, (), table)
