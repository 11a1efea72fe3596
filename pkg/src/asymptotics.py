"""
Asymptotic Expansions
Extraction of e^{mu xi/z}(R_0 + R_1 z/xi + ...) from fixed-point series at
z = 0, the R-recursions along the S-tower, the X-relation and finite-order
ring-membership fits.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.birkhoff import CSeriesSet, SOperatorTower
from src.geometry import FixedPointFamily
from src.series import (
    InsufficientOrderError,
    SeriesError,
    TruncSeries,
    fit_in_polynomial_ring,
    fit_laurent_in_generator,
)
from src.zseries import OriginExpansion

logger = logging.getLogger(__name__)

NO_LIFT = "no lift found within degree window"
LOW_ORDER = "insufficient truncation order"


class NormalizationError(SeriesError):
    def __init__(self, detail: str = ""):
        super().__init__(f"not asymptotically normalizable{': ' + detail if detail else ''}")


@dataclass
class AsymptoticExpansion:
    """
    mu and the R_{kp} series at one fixed point.

    rows[k][p] = R_{kp}; prefactors[k] is the xi-free part of the z^0
    coefficient of e^{-U/z} S(H^k), i.e. L^k / (C_1 ... C_k).
    """

    point: Tuple[int, ...]
    xi: object
    mu: TruncSeries
    rows: Dict[int, List[TruncSeries]]
    prefactors: Dict[int, TruncSeries] = field(default_factory=dict)

    def r(self, k: int, p: int) -> TruncSeries:
        return self.rows[k][p]

    @property
    def u(self) -> TruncSeries:
        return self.mu * self.xi


def _exponential_part(member: OriginExpansion) -> TruncSeries:
    """U with member = e^{U/z} * (regular at z = 0)."""
    log_member = member.log()
    for (d, k), c in log_member.series.coeffs.items():
        if k - d < -1:
            raise NormalizationError(f"z^{k - d} term in log at q^{d}")
    return log_member.z_coefficient(-1)


def _regular_coefficients(product: OriginExpansion, depth: int) -> List[TruncSeries]:
    if product.min_z_power() < 0:
        raise NormalizationError(f"pole z^{product.min_z_power()} after removing the exponential")
    return [product.z_coefficient(p) for p in range(depth + 1)]


def extract_asymptotics(fam: FixedPointFamily, point, z_depth: int) -> AsymptoticExpansion:
    """
    Asymptotic data of a single family at one fixed point.

    Raises:
        NormalizationError: if the series does not start with 1 or log has
            poles beyond 1/z
    """
    point = tuple(point)
    member = fam[point]
    if not isinstance(member, OriginExpansion):
        raise NormalizationError("asymptotics are read at z = 0")
    if member.series.constant_term() != 1:
        raise NormalizationError("leading term is not 1")
    xi = fam.grading[point]["q"]
    u = _exponential_part(member)
    damp = OriginExpansion.from_z_inverse(-u, member.z_order).exp()
    coeffs = _regular_coefficients(member * damp, z_depth)
    row = [c * (xi ** p) for p, c in enumerate(coeffs)]
    one = TruncSeries.constant(1, u.variables, u.orders)
    return AsymptoticExpansion(point, xi, u / xi, {0: row}, {0: one})


def tower_prefactors(c: CSeriesSet, L: TruncSeries, depth: int) -> Dict[int, TruncSeries]:
    """L^k / (C_1 ... C_k) for k = 0..depth"""
    out = {0: TruncSeries.constant(1, L.variables, L.orders)}
    for k in range(1, depth + 1):
        out[k] = out[k - 1] * L / c[k] if k < len(c) else out[k - 1] * L
    return out


def tower_asymptotics(tower: SOperatorTower, point, z_depth: int, L: TruncSeries) -> AsymptoticExpansion:
    """
    R_{kp} = xi^p [z^p](e^{-U/z} S(H^k)) / (xi^k P_k) along an origin tower.
    """
    point = tuple(point)
    base = tower.at(0, point)
    xi = tower.stages[0].grading[point]["q"]
    u = _exponential_part(base)
    damp = OriginExpansion.from_z_inverse(-u, base.z_order).exp()
    prefactors = tower_prefactors(tower.c, L, tower.depth)
    rows = {}
    for k in range(tower.depth):
        coeffs = _regular_coefficients(tower.at(k, point) * damp, z_depth)
        inv = (prefactors[k] * (xi ** k)).inverse()
        rows[k] = [c * inv * (xi ** p) for p, c in enumerate(coeffs)]
    logger.debug("asymptotics at %s: %d rows to z^%d", point, len(rows), z_depth)
    return AsymptoticExpansion(point, xi, u / xi, rows, prefactors)


def damped_tower(tower: SOperatorTower, point, z_depth: int, var: str = "z") -> List[TruncSeries]:
    """e^{-U/z} S_point(H^k) as (q, var) series for every stage."""
    point = tuple(point)
    base = tower.at(0, point)
    damp = OriginExpansion.from_z_inverse(-_exponential_part(base), base.z_order).exp()
    return [(tower.at(k, point) * damp).q_z_series(z_depth, var) for k in range(tower.depth)]


# ---------------------------------------------------------------------------
# Recursions
# ---------------------------------------------------------------------------

def d_l(L: TruncSeries, m: int = 4) -> TruncSeries:
    """q dL/dq = (L^{m+1} - L)/m for L = (1 - m^m q)^{-1/m}"""
    return (L ** (m + 1) - L) * Fraction(1, m)


def verify_r_recursion(exp: AsymptoticExpansion, L: TruncSeries, p_max: int) -> Dict[str, TruncSeries]:
    """
    Residuals of R_{k+1,p+1} = R_{k,p+1} + (D R_{kp} + (D P_k / P_k) R_{kp}) / L.

    The closing row maps the last stage back to R_{0,p+1} through H^depth = 1.
    Keys: "1+Dmu-L", "row k p" and "close p"; all-zero means pass.
    """
    residuals = {"1+Dmu-L": exp.mu.d_op() + 1 - L}
    depth = len(exp.rows)
    log_d = {k: exp.prefactors[k].d_op() / exp.prefactors[k] for k in range(depth)}
    inv_l = L.inverse()
    for p in range(p_max + 1):
        for k in range(depth):
            source = exp.rows[k]
            if p + 1 >= len(source):
                raise InsufficientOrderError(f"R_{k},{p + 1} not extracted")
            step = (source[p].d_op() + log_d[k] * source[p]) * inv_l
            if k + 1 < depth:
                residuals[f"row {k} {p}"] = exp.rows[k + 1][p + 1] - source[p + 1] - step
            else:
                residuals[f"close {p}"] = exp.rows[0][p + 1] - source[p + 1] - step
    return residuals


def drule_residual(X: TruncSeries, L: TruncSeries) -> TruncSeries:
    """X^2 - (L^4 - 1) X - (L^4 - 1)/4 + D X"""
    l4 = L ** 4 - 1
    return X * X - l4 * X - l4 * Fraction(1, 4) + X.d_op()


def closed_form_r(L: TruncSeries) -> Tuple[TruncSeries, TruncSeries]:
    """R_0 = L^{1/2} and R_1 = L^{1/2}(3/(32L) + 1/24 - 13L^3/96)"""
    root = L.power(Fraction(1, 2))
    r1 = root * (L.inverse() * Fraction(3, 32) + Fraction(1, 24) - (L ** 3) * Fraction(13, 96))
    return root, r1


def a2_and_chi(c1: TruncSeries, L: TruncSeries) -> Tuple[TruncSeries, TruncSeries]:
    """X = D C_1 / C_1 and A_2 = (X + 1/2 - L^4/4) / L^4"""
    X = c1.d_op() / c1
    l4 = L ** 4
    return X, (X + Fraction(1, 2) - l4 * Fraction(1, 4)) / l4


# ---------------------------------------------------------------------------
# Ring membership
# ---------------------------------------------------------------------------

def _fit_status(fit) -> Dict:
    if fit is None:
        return {"ok": False, "status": NO_LIFT}
    return {"ok": True, "status": "fit", "coefficients": fit}


def fit_laurent(target: TruncSeries, L: TruncSeries, window: Tuple[int, int], margin: int) -> Dict:
    try:
        return _fit_status(fit_laurent_in_generator(target, L, window, margin))
    except InsufficientOrderError:
        return {"ok": False, "status": LOW_ORDER}


def structure_check(exp: AsymptoticExpansion, L: TruncSeries, X: TruncSeries, k_max: int, margin: int = 5, windows: Optional[Dict[int, Tuple[int, int]]] = None) -> Dict[str, Dict]:
    """
    Finite-order membership fits of R_{jk} / L^{1/2} in Q[L^{+-1}].

    R_{0k}, R_{1k}, R_{3k} are fitted directly; the stage-2 row is fitted as
    Q_{2k} = R_{2k} + R_{1,k-1} X / L.

    Args:
        windows: k -> Laurent degree window (default (-k-1, 3k+1))
    """
    root_inv = L.power(Fraction(-1, 2))
    inv_l = L.inverse()
    report: Dict[str, Dict] = {}
    for k in range(k_max + 1):
        window = (windows or {}).get(k, (-k - 1, 3 * k + 1))
        for j, row in exp.rows.items():
            if k >= len(row):
                continue
            target = row[k]
            name = f"R{j}{k}"
            if j == 2 and k >= 1:
                target = target + exp.rows[1][k - 1] * X * inv_l
                name = f"Q2{k}"
            report[name] = fit_laurent(target * root_inv, L, window, margin)
    failing = [name for name, entry in report.items() if not entry["ok"]]
    if failing:
        logger.info("structure check: %d non-conforming entries (%s)", len(failing), ", ".join(failing))
    return report


def ring_closure_check(sample: Dict[Tuple[int, int], object], L: TruncSeries, X: TruncSeries, margin: int = 5) -> Dict:
    """
    D of a Laurent polynomial in (L, X) fitted back into Q[L^{+-1}][X].

    D L = (L^5 - L)/4 and the X-relation raise the L-window by 4 and the
    X-degree by 1 at most.
    """
    value = TruncSeries.zero(L.variables, L.orders)
    for (j, k), c in sample.items():
        value = value + (L ** j) * (X ** k) * c
    lo = min(j for j, _ in sample)
    hi = max(j for j, _ in sample) + 4
    degree = max(k for _, k in sample) + 1
    try:
        return _fit_status(fit_in_polynomial_ring(value.d_op(), L, (lo, hi), X, degree, margin))
    except InsufficientOrderError:
        return {"ok": False, "status": LOW_ORDER}
