"""
S-Operators by Birkhoff Factorization
Normalized-derivative towers S(H^k) built from I-functions, the C_k
normalization series, the mirror map and the V-series obtained from the
S-quadratic identity.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from src.geometry import (
    HYPERSURFACE,
    FixedPointFamily,
    Geometry,
    PairingData,
    lagrange_basis,
    pairing_data,
)
from src.series import SeriesError, TruncSeries
from src.zseries import InfinityExpansion, OriginExpansion

logger = logging.getLogger(__name__)


class BirkhoffBreakdownError(SeriesError):
    def __init__(self, k: int):
        super().__init__(f"Birkhoff breakdown: normalization C_{k} has no unit constant term")


class QuadraticIdentityError(SeriesError):
    def __init__(self, detail: str = ""):
        super().__init__(f"quadratic identity violated{': ' + detail if detail else ''}")


@dataclass
class CSeriesSet:
    """Normalizations C_0, C_1, ... of the S-tower (all unit series in q)."""

    values: List[TruncSeries]

    def __getitem__(self, k: int) -> TruncSeries:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def product(self, upto: int) -> TruncSeries:
        """C_1 * ... * C_upto"""
        out = TruncSeries.constant(1, self.values[0].variables, self.values[0].orders)
        for k in range(1, upto + 1):
            out = out * self.values[k]
        return out


@dataclass
class SOperatorTower:
    """S(H^k) for k = 0..depth-1 as fixed-point families."""

    geometry: Geometry
    stages: List[FixedPointFamily]
    c: CSeriesSet
    normalizing_point: Tuple[int, ...]
    extra: Dict[str, TruncSeries] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.stages)

    def at(self, k: int, point) -> object:
        return self.stages[k][tuple(point)]


def _at_q2_zero(fam: FixedPointFamily) -> FixedPointFamily:
    """Restrict a (q1, q2) hypersurface family to q2 = 0 and rename q1 to q."""
    members, grading = {}, {}
    for p, member in fam.members.items():
        series = member.series
        if "q2" in series.variables:
            series = series.restrict("q2")
        if "q1" in series.variables:
            series = series.identify(["q1"], "q")
        members[p] = InfinityExpansion(series, member.shift)
        grading[p] = {"q": fam.grading[p]["q1"] if "q1" in fam.grading[p] else fam.grading[p]["q"]}
    return FixedPointFamily(fam.geometry, members, grading, fam.removed_factor)


def _normalizing_point(fam: FixedPointFamily) -> Tuple[int, ...]:
    """The fixed point where the tower's H restriction equals 1."""
    for p, weights in fam.grading.items():
        if weights["q"] == 1 and (len(p) == 1 or p[1] == 0):
            return p
    raise BirkhoffBreakdownError(0)


def _divide(fam: FixedPointFamily, c: TruncSeries) -> FixedPointFamily:
    inv = c.inverse()
    return FixedPointFamily(fam.geometry, {p: m.times_q_series(inv) for p, m in fam.members.items()}, fam.grading)


def build_s_tower(fam: FixedPointFamily, depth: Optional[int] = None, c_series: Optional[CSeriesSet] = None) -> SOperatorTower:
    """
    Normalized-derivative tower S(1) = I/C_0, S(H^{k+1}) = theta S(H^k)/C_{k+1}.

    At z = infinity each C_k is the z^0 coefficient at the point with H = 1.
    Expansions at z = 0 carry no z^0 normalization, so c_series from the
    z = infinity tower must be supplied.

    Args:
        fam: normalized I-function family (q or (q1, q2) with q2 order 0)
        depth: number of stages (default: number of distinct H restrictions)
        c_series: precomputed normalizations for z = 0 expansions

    Raises:
        BirkhoffBreakdownError: if a normalization is not a unit series
    """
    geom = fam.geometry
    origin = isinstance(next(iter(fam.members.values())), OriginExpansion)
    if geom.kind == HYPERSURFACE and not origin:
        fam = _at_q2_zero(fam)
    if depth is None:
        depth = geom.m if geom.kind == HYPERSURFACE else 4
    if origin and c_series is None:
        raise ValueError("expansions at z = 0 need normalizations from the z = infinity tower")
    point = _normalizing_point(fam)

    values: List[TruncSeries] = []
    stages: List[FixedPointFamily] = []
    current = fam
    for k in range(depth):
        if k:
            current = current.theta("q")
        if origin:
            c = c_series[k]
        else:
            c = current[point].z_coefficient(0)
        if c.constant_term() != 1:
            raise BirkhoffBreakdownError(k)
        current = _divide(current, c)
        values.append(c)
        stages.append(current)
        logger.debug("S-tower stage %d built", k)
    return SOperatorTower(geom, stages, c_series if origin else CSeriesSet(values), point)


def c_series(tower: SOperatorTower) -> CSeriesSet:
    return tower.c


def closing_normalization(tower: SOperatorTower) -> TruncSeries:
    """
    z^0 coefficient of theta S(H^{depth-1}) at the normalizing point.

    Equals 1 when the tower closes (S(H^depth) = S(1) in the cyclotomic
    relation H^depth = 1).
    """
    last = tower.stages[-1]
    return last.theta("q")[tower.normalizing_point].z_coefficient(0)


def tower_shape_defects(tower: SOperatorTower) -> List[Tuple[int, Tuple[int, ...]]]:
    """(k, point) pairs where S(H^k) at z = infinity is not H^k + O(1/z)."""
    defects = []
    for k, stage in enumerate(tower.stages):
        for p, member in stage.members.items():
            if not isinstance(member, InfinityExpansion):
                continue
            h = stage.grading[p]["q"]
            for e in range(1, member.shift + 1):
                if not member.z_coefficient(e).is_zero():
                    defects.append((k, p))
                    break
            else:
                lead = member.z_coefficient(0)
                if lead != TruncSeries.constant(h ** k, lead.variables, lead.orders):
                    defects.append((k, p))
    return defects


# ---------------------------------------------------------------------------
# Mirror map
# ---------------------------------------------------------------------------

def mirror_map(i1: TruncSeries) -> Tuple[TruncSeries, TruncSeries]:
    """
    Returns:
        (T - log q, Q) with T = log q + I_1 and Q = q exp(I_1)
    """
    q = TruncSeries.variable("q", i1.variables, i1.orders)
    return i1, q * i1.exp()


def d_dt(series: TruncSeries, c1: TruncSeries) -> TruncSeries:
    """d/dT = (1/C_1) q d/dq"""
    return series.d_op() / c1


# ---------------------------------------------------------------------------
# V-series
# ---------------------------------------------------------------------------

def divide_by_sum(numerator: TruncSeries, xvar: str, yvar: str) -> TruncSeries:
    """
    Exact quotient by (xvar + yvar), one homogeneous (xvar, yvar)-degree at a time.

    Homogeneous parts are complete only up to total degree M = min of the two
    orders, so the quotient is returned with both orders (M - 1) // 2.

    Raises:
        QuadraticIdentityError: if some homogeneous part does not vanish at
            yvar = -xvar
    """
    ix, iy = numerator.variables.index(xvar), numerator.variables.index(yvar)
    top = min(numerator.orders[ix], numerator.orders[iy])
    groups: Dict[Tuple, Dict[int, object]] = {}
    for e, c in numerator.coeffs.items():
        total = e[ix] + e[iy]
        if total > top:
            continue
        rest = tuple(a for k, a in enumerate(e) if k not in (ix, iy))
        groups.setdefault((rest, total), {})[e[ix]] = c
    coeffs = {}
    for (rest, total), row in groups.items():
        quotient = []
        carry = 0
        for a in range(total):
            carry = row.get(a, 0) - carry
            quotient.append(carry)
        if row.get(total, 0) != carry:
            raise QuadraticIdentityError(f"remainder at degree {total}, {rest}")
        for a, c in enumerate(quotient):
            if not c:
                continue
            full = list(rest)
            for pos, val in sorted(((ix, a), (iy, total - 1 - a))):
                full.insert(pos, val)
            coeffs[tuple(full)] = c
    orders = list(numerator.orders)
    orders[ix] = orders[iy] = max((top - 1) // 2, 0)
    return TruncSeries(numerator.variables, orders, coeffs)


def lagrange_stages(tower: SOperatorTower, point, nodes: Optional[List] = None) -> List[object]:
    """
    S_point(phi_k) for the Lagrange basis phi_k with phi_k(nodes[r]) = delta_kr.

    nodes defaults to the H restrictions of all fixed points.
    """
    if nodes is None:
        nodes = [tower.stages[0].grading[p]["q"] for p in tower.stages[0].members]
    if len(set(nodes)) < len(nodes) or tower.depth < len(nodes):
        raise ValueError("tower does not span the fixed-point basis")
    out = []
    for coeffs in lagrange_basis(nodes):
        total = None
        for a, c in enumerate(coeffs):
            if not c:
                continue
            term = tower.at(a, point) * c
            total = term if total is None else total + term
        out.append(total)
    return out


@dataclass
class VSeries:
    """e_i V_ij e_j = singular/(x+y) + regular(q, X=1/x, Y=1/y)."""

    i: Tuple[int, ...]
    j: Tuple[int, ...]
    singular: object
    regular: TruncSeries


def embed_pair(left: TruncSeries, right: TruncSeries, names: Tuple[str, str] = ("X", "Y")) -> Tuple[TruncSeries, TruncSeries]:
    """
    Place two (q, v) series into (q, x, y) as functions of x and of y alone.

    The absent variable takes the other factor's order, so the product keeps
    both orders.
    """
    variables = ("q",) + tuple(names)
    q_order = min(left.orders[0], right.orders[0])
    a = TruncSeries(variables, (q_order, left.orders[1], right.orders[1]),
                    {(d, k, 0): c for (d, k), c in left.coeffs.items()})
    b = TruncSeries(variables, (q_order, left.orders[1], right.orders[1]),
                    {(d, 0, k): c for (d, k), c in right.coeffs.items()})
    return a, b


def v_from_s(tower: SOperatorTower, pairs: Optional[List[Tuple]] = None, pairing: Optional[PairingData] = None) -> Dict[Tuple, VSeries]:
    """
    V-series from sum_k S_i(phi_k)|_{z=x} S_j(phi^k)|_{z=y} / (x+y).

    Needs a z = infinity tower spanning the basis. The pairing term
    e_i delta_ij is split off as the singular part; the rest is divided by
    x + y exactly and multiplied back by XY = 1/(xy).
    """
    pairing = pairing or pairing_data(tower.geometry)
    points = list(tower.stages[0].members)
    pairs = pairs or [(i, j) for i in points for j in points]
    restricted = {}
    for p in {p for pair in pairs for p in pair}:
        restricted[p] = [s.inverse_z_series("w") for s in lagrange_stages(tower, p)]
    out = {}
    for i, j in pairs:
        numerator = None
        for k, pk in enumerate(points):
            a, b = embed_pair(restricted[i][k], restricted[j][k])
            term = a * b * pairing.euler[pk]
            numerator = term if numerator is None else numerator + term
        singular = pairing.euler[i] if i == j else 0
        quotient = divide_by_sum(numerator - singular, "X", "Y")
        regular = TruncSeries(quotient.variables,
                              (quotient.orders[0], quotient.orders[1] + 1, quotient.orders[2] + 1),
                              {(d, a + 1, b + 1): c for (d, a, b), c in quotient.coeffs.items()})
        out[(i, j)] = VSeries(i, j, singular, regular)
        logger.debug("V-series %s-%s: %d terms", i, j, len(regular.coeffs))
    return out
