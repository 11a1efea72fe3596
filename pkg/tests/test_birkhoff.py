"""
Tests for S-operator towers, the C_k normalizations, the mirror map and
V-series from the quadratic identity.
"""
import sys
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.birkhoff import (
    QuadraticIdentityError,
    build_s_tower,
    closing_normalization,
    d_dt,
    divide_by_sum,
    mirror_map,
    tower_shape_defects,
    v_from_s,
)
from src.geometry import Geometry, base_series, i_twisted_p3, l_series
from src.series import TruncSeries

ORDER = 4


@pytest.fixture(scope="module")
def tower():
    return build_s_tower(i_twisted_p3(ORDER, 5))


# ---------------------------------------------------------------------------
# Tests — Normalizations
# ---------------------------------------------------------------------------

class TestTower:
    def test_depth(self, tower):
        assert tower.depth == 4

    def test_c0_is_one(self, tower):
        assert (tower.c[0] - 1).is_zero()

    def test_c1_equals_c3(self, tower):
        assert (tower.c[1] - tower.c[3]).is_zero()

    def test_product_is_l_to_the_fourth(self, tower):
        assert (tower.c.product(3) - l_series(ORDER) ** 4).is_zero()

    def test_c1_from_i1(self, tower):
        """C_1 = 1 + D I_1 = 1 + 4q + 36q^2 + ..."""
        expected = base_series(Geometry.twisted_p3(), ORDER)["C1"]
        assert (tower.c[1] - expected).is_zero()
        assert tower.c[1].coefficients()[:3] == [1, 4, 36]

    def test_tower_closes(self, tower):
        assert (closing_normalization(tower) - 1).is_zero()

    def test_shape(self, tower):
        assert tower_shape_defects(tower) == []

    def test_origin_needs_normalizations(self):
        with pytest.raises(ValueError):
            build_s_tower(i_twisted_p3(2, 4, "origin"))


# ---------------------------------------------------------------------------
# Tests — Mirror map
# ---------------------------------------------------------------------------

class TestMirrorMap:
    def test_mirror_map(self):
        i1 = base_series(Geometry.local_p1p1(), 3)["I1"]
        t_minus_log_q, Q = mirror_map(i1)
        assert t_minus_log_q == i1
        assert Q.coefficients()[:3] == [0, 1, 4]

    def test_d_dt_of_t_is_one(self):
        """dT/dT = D(log q + I_1)/C_1 = 1"""
        series = base_series(Geometry.local_p1p1(), 5)
        assert ((series["I1"].d_op() + 1) / series["C1"] - 1).is_zero()
        assert (d_dt(series["I1"], series["C1"]) * series["C1"] - series["C1"] + 1).is_zero()


# ---------------------------------------------------------------------------
# Tests — Quadratic identity
# ---------------------------------------------------------------------------

class TestVSeries:
    def test_divide_by_sum(self):
        numerator = TruncSeries(("X", "Y"), (4, 4), {(2, 0): 1, (0, 2): -1})
        quotient = divide_by_sum(numerator, "X", "Y")
        assert quotient.coeffs == {(1, 0): 1, (0, 1): -1}

    def test_divide_by_sum_rejects_remainder(self):
        numerator = TruncSeries(("X", "Y"), (4, 4), {(2, 0): 1, (0, 2): 1})
        with pytest.raises(QuadraticIdentityError, match="quadratic identity violated"):
            divide_by_sum(numerator, "X", "Y")

    def test_v_series_exist(self):
        small = build_s_tower(i_twisted_p3(2, 7))
        v = v_from_s(small, pairs=[((0,), (0,)), ((0,), (1,))])
        assert v[((0,), (0,))].singular == -4
        assert v[((0,), (1,))].singular == 0
