"""
Geometry and I-Functions
Torus fixed-point data for the twisted P^3 model, local P^1 x P^1 and the
anti-canonical hypersurfaces in P^{m-1} x P^{n-1}; generators for their
I-functions restricted to fixed points, Picard-Fuchs residuals and the
named base series.
"""
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.scalars import Cyclotomic, EpsLaurent
from src.series import RegulatorError, TruncSeries, geometric
from src.zseries import InfinityExpansion, OriginExpansion

logger = logging.getLogger(__name__)

TWISTED_P3 = "twisted-p3"
LOCAL_P1P1 = "local-p1p1"
HYPERSURFACE = "hypersurface"
GEOMETRIES = (TWISTED_P3, LOCAL_P1P1, HYPERSURFACE)

DEFAULT_EPS_ORDER = 4


class DegenerateTorusDataError(ValueError):
    def __init__(self, detail: str):
        super().__init__(f"degenerate torus data: {detail}")


class NoPFStructureError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__(f"no PF structure{': ' + detail if detail else ''}")


# ---------------------------------------------------------------------------
# Fixed points and geometry descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint:
    """Restriction data of one torus-fixed point."""

    index: Tuple[int, ...]
    weights: Dict[str, object]
    tangent: Tuple[object, ...] = ()
    twist_numerator: Tuple[object, ...] = ()
    twist_denominator: Tuple[object, ...] = ()

    @property
    def label(self) -> str:
        return "p" + "".join(str(i) for i in self.index)


@dataclass
class Geometry:
    """Geometry descriptor with its fixed points and specializations."""

    kind: str
    points: List[FixedPoint]
    field_order: int
    m: int = 0
    n: int = 0
    regulator: Optional[Tuple[Fraction, ...]] = None
    eps_order: int = DEFAULT_EPS_ORDER

    # -- constructors ------------------------------------------------------
    @classmethod
    def twisted_p3(cls) -> "Geometry":
        points = []
        for i in range(4):
            xi = Cyclotomic.root(4, i)
            tangent = tuple(xi - Cyclotomic.root(4, j) for j in range(4) if j != i)
            # O(2) twisted by the Euler class, O(-2) by its inverse
            points.append(FixedPoint((i,), {"H": xi}, tangent, (-2 * xi,), (2 * xi,)))
        return cls(TWISTED_P3, points, 4)

    @classmethod
    def local_p1p1(cls) -> "Geometry":
        i_unit = Cyclotomic.root(4, 1)
        lam = {
            0: (1 + i_unit) / 2,
            1: -(1 + i_unit) / 2,
            2: (1 - i_unit) / 2,
            3: -(1 - i_unit) / 2,
        }
        # fixed point of P^1 x P^1 ordered so that H1 + H2 = zeta_4^i
        pairs = {0: (0, 2), 1: (0, 3), 2: (1, 3), 3: (1, 2)}
        points = []
        for i, (a, b) in pairs.items():
            w1, w2 = 2 * lam[a], 2 * lam[b]
            xi = lam[a] + lam[b]
            if xi != Cyclotomic.root(4, i):
                raise DegenerateTorusDataError(f"Segre weight mismatch at point {i}")
            points.append(FixedPoint((i,), {"H": xi, "H1": lam[a], "H2": lam[b]}, (w1, w2, -(w1 + w2))))
        return cls(LOCAL_P1P1, points, 4)

    @classmethod
    def hypersurface(cls, m: int, n: int, regulator: Optional[Sequence] = None, eps_order: int = DEFAULT_EPS_ORDER) -> "Geometry":
        """
        Anti-canonical hypersurface of P^{m-1} x P^{n-1}.

        Args:
            m, n: projective dimensions plus one (both >= 2)
            regulator: rationals c_i with lambda_i = c_i * eps, or None for lambda = 0
            eps_order: eps truncation of the regulated weights
        """
        if m < 2 or n < 2:
            raise ValueError(f"hypersurface needs m, n >= 2, got ({m}, {n})")
        if regulator is not None:
            regulator = tuple(Fraction(c) for c in regulator)[:n]
            if len(regulator) < n:
                raise ValueError(f"regulator needs {n} values, got {len(regulator)}")
            if len(set(regulator)) < n or any(c == 0 for c in regulator):
                raise RegulatorError(regulator)
            lambdas = [EpsLaurent({1: Cyclotomic.rational(m, c)}, eps_order) for c in regulator]
        else:
            lambdas = [0] * n
        alphas = [Cyclotomic.root(m, k) for k in range(m)]
        points = []
        for k in range(m):
            for i in range(n):
                tangent = tuple(alphas[k] - alphas[l] for l in range(m) if l != k)
                tangent += tuple(lambdas[i] - lambdas[j] for j in range(n) if j != i)
                points.append(FixedPoint((k, i), {"H1": alphas[k], "H2": lambdas[i]}, tangent, (), (m * alphas[k] + n * lambdas[i],)))
        return cls(HYPERSURFACE, points, m, m=m, n=n, regulator=regulator, eps_order=eps_order)

    @classmethod
    def from_dict(cls, doc: Dict) -> "Geometry":
        kind = doc.get("geometry")
        if kind == TWISTED_P3:
            return cls.twisted_p3()
        if kind == LOCAL_P1P1:
            return cls.local_p1p1()
        if kind == HYPERSURFACE:
            return cls.hypersurface(int(doc["m"]), int(doc["n"]), doc.get("regulator"))
        raise ValueError(f"unknown geometry {kind!r}; expected one of {GEOMETRIES}")

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "Geometry":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    # -- helpers -----------------------------------------------------------
    def point(self, *index: int) -> FixedPoint:
        for p in self.points:
            if p.index == tuple(index):
                return p
        raise KeyError(index)

    @property
    def alphas(self) -> List[Cyclotomic]:
        return [Cyclotomic.root(self.m, k) for k in range(self.m)]

    @property
    def lambdas(self) -> List:
        return [self.point(0, i).weights["H2"] for i in range(self.n)]


# ---------------------------------------------------------------------------
# Fixed-point families
# ---------------------------------------------------------------------------

@dataclass
class FixedPointFamily:
    """
    A cohomology-valued series stored as its restrictions to fixed points.

    grading maps each point to the weights {q-variable: H-restriction} of the
    e^{t(H + dz)/z} prefactor; it is what the z d/dt operators act through.
    """

    geometry: Geometry
    members: Dict[Tuple[int, ...], Union[InfinityExpansion, OriginExpansion]]
    grading: Optional[Dict[Tuple[int, ...], Dict[str, object]]] = None
    removed_factor: Dict[Tuple[int, ...], object] = field(default_factory=dict)

    def __getitem__(self, index) -> Union[InfinityExpansion, OriginExpansion]:
        return self.members[tuple(index)]

    def points(self) -> List[Tuple[int, ...]]:
        return list(self.members)

    def theta(self, var: str) -> "FixedPointFamily":
        """Apply z d/dt in the direction of var at every point."""
        if self.grading is None:
            raise NoPFStructureError("family carries no grading")
        out = {}
        for p, member in self.members.items():
            weight = self.grading[p][var]
            if isinstance(member, InfinityExpansion):
                out[p] = member.theta(weight, var)
            else:
                out[p] = member.theta(weight)
        return FixedPointFamily(self.geometry, out, self.grading)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.members.values())


def _twisted_p3_terms(xi, order: int):
    roots = [Cyclotomic.root(4, j) for j in range(4)]
    terms = {}
    for d in range(order + 1):
        num = [(-2 * xi, -k) for k in range(2 * d)]
        num += [(2 * xi, k) for k in range(1, 2 * d + 1)]
        den = [(xi - r, k) for r in roots for k in range(1, d + 1)]
        terms[d] = (num, den)
    return terms


def i_twisted_p3(order_q: int, order_z: int, representation: str = "infinity", points: Optional[Sequence[int]] = None) -> FixedPointFamily:
    """
    Twisted P^3 I-function at t = 0, restricted to xi_i = zeta_4^i.

    The d = 0 factor 2H of the second product is divided out, so every
    restriction starts with 1.

    Args:
        order_q: q truncation
        order_z: w-order (infinity) or z-order (origin)
        representation: "infinity" or "origin"
        points: subset of fixed-point indices (default all four)
    """
    geom = Geometry.twisted_p3()
    members, grading, removed = {}, {}, {}
    for p in geom.points:
        if points is not None and p.index[0] not in points:
            continue
        xi = p.weights["H"]
        terms = _twisted_p3_terms(xi, order_q)
        if representation == "infinity":
            members[p.index] = InfinityExpansion.from_terms({(d,): t for d, t in terms.items()}, ("q",), (order_q,), order_z)
        else:
            members[p.index] = OriginExpansion.from_terms(terms, order_q, order_z)
        grading[p.index] = {"q": xi}
        removed[p.index] = 2 * xi
    logger.debug("twisted P3 I-function built: q^%d, %s order %d", order_q, representation, order_z)
    return FixedPointFamily(geom, members, grading, removed)


def _hypersurface_terms(geom: Geometry, p: FixedPoint, order1: int, order2: int):
    m, n = geom.m, geom.n
    alpha, lam = p.weights["H1"], p.weights["H2"]
    lambdas = geom.lambdas
    top = m * alpha + n * lam
    terms = {}
    for d1 in range(order1 + 1):
        for d2 in range(order2 + 1):
            num = [(top, k) for k in range(1, m * d1 + n * d2 + 1)]
            den = [(alpha - a, k) for a in geom.alphas for k in range(1, d1 + 1)]
            den += [(lam - l2, k) for l2 in lambdas for k in range(1, d2 + 1)]
            terms[(d1, d2)] = (num, den)
    return terms


def i_hypersurface(geom: Geometry, order: int, w_order: int, order_q2: Optional[int] = None) -> FixedPointFamily:
    """
    Hypersurface I-function at t = 0 in (q1, q2), expanded at z = infinity.

    Args:
        geom: HYPERSURFACE geometry
        order: q1 truncation
        w_order: truncation in 1/z
        order_q2: q2 truncation (default: same as order; 0 restricts to q2 = 0)
    """
    if geom.kind != HYPERSURFACE:
        raise ValueError(f"i_hypersurface needs a hypersurface, got {geom.kind}")
    order2 = order if order_q2 is None else order_q2
    members, grading = {}, {}
    for p in geom.points:
        terms = _hypersurface_terms(geom, p, order, order2)
        members[p.index] = InfinityExpansion.from_terms(terms, ("q1", "q2"), (order, order2), w_order)
        grading[p.index] = {"q1": p.weights["H1"], "q2": p.weights["H2"]}
    return FixedPointFamily(geom, members, grading)


def i_hypersurface_origin(geom: Geometry, order: int, z_order: int) -> FixedPointFamily:
    """Hypersurface I-function at q2 = 0, expanded at z = 0 (variable q = q1)."""
    members, grading = {}, {}
    for p in geom.points:
        terms = {d1: t for (d1, _), t in _hypersurface_terms(geom, p, order, 0).items()}
        members[p.index] = OriginExpansion.from_terms(terms, order, z_order)
        grading[p.index] = {"q": p.weights["H1"]}
    return FixedPointFamily(geom, members, grading)


# ---------------------------------------------------------------------------
# Picard-Fuchs residuals
# ---------------------------------------------------------------------------

def _linear(member: InfinityExpansion, weights: Dict[str, object], theta: Dict[str, object], z_coeff=0, const=0) -> InfinityExpansion:
    """(sum_v theta[v] * theta_v + z_coeff * z + const) applied to member."""
    out = None
    for var, c in theta.items():
        if not c:
            continue
        term = member.theta(weights[var], var) * c
        out = term if out is None else out + term
    if z_coeff:
        term = member.times_z(1) * z_coeff
        out = term if out is None else out + term
    if const:
        term = member * const
        out = term if out is None else out + term
    if out is None:
        return member * 0
    return out


def _chain(member: InfinityExpansion, weights, factors) -> InfinityExpansion:
    for theta, z_coeff, const in reversed(factors):
        member = _linear(member, weights, theta, z_coeff, const)
    return member


def _times_variable(member: InfinityExpansion, var: str) -> InfinityExpansion:
    v = TruncSeries.variable(var, member.series.variables, member.series.orders)
    return InfinityExpansion(member.series * v, member.shift)


def picard_fuchs_residual(fam: FixedPointFamily) -> Dict[str, FixedPointFamily]:
    """
    Apply the Picard-Fuchs operators of the family's geometry.

    Returns:
        Dict operator name -> residual family (all-zero means annihilation)
    """
    if fam.grading is None:
        raise NoPFStructureError("family carries no grading")
    geom = fam.geometry
    residuals: Dict[str, Dict] = {}
    for p, member in fam.members.items():
        if not isinstance(member, InfinityExpansion):
            raise NoPFStructureError("residuals are taken at z = infinity")
        weights = fam.grading[p]
        if geom.kind in (TWISTED_P3, LOCAL_P1P1):
            if set(weights) != {"q"}:
                raise NoPFStructureError(f"unexpected grading {sorted(weights)}")
            th = {"q": 1}
            lhs = _chain(member, weights, [(th, 0, 0)] * 4) - member
            rhs = _chain(member, weights, [({"q": 2}, 1, 0), ({"q": 2}, 2, 0), ({"q": -2}, 0, 0), ({"q": -2}, -1, 0)])
            residuals.setdefault("PF", {})[p] = lhs - _times_variable(rhs, "q")
        elif geom.kind == HYPERSURFACE:
            if set(weights) != {"q1", "q2"}:
                raise NoPFStructureError(f"unexpected grading {sorted(weights)}")
            m, n = geom.m, geom.n
            mixed = [({"q1": m, "q2": n}, l, 0) for l in range(1, m + 1)]
            lhs1 = _chain(member, weights, [({"q1": 1}, 0, 0)] * m) - member
            residuals.setdefault("PF1", {})[p] = lhs1 - _times_variable(_chain(member, weights, mixed), "q1")
            mixed2 = [({"q1": m, "q2": n}, l, 0) for l in range(1, n + 1)]
            lhs2 = _chain(member, weights, [({"q2": 1}, 0, -l2) for l2 in geom.lambdas])
            residuals.setdefault("PF2", {})[p] = lhs2 - _times_variable(_chain(member, weights, mixed2), "q2")
        else:
            raise NoPFStructureError(f"unknown geometry {geom.kind}")
    return {name: FixedPointFamily(geom, members) for name, members in residuals.items()}


# ---------------------------------------------------------------------------
# Base series
# ---------------------------------------------------------------------------

def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))


def central_binomial_series(order: int, m: int = 2) -> TruncSeries:
    """sum (m d)!/(d!)^m q^d"""
    return TruncSeries.from_function(lambda d: Fraction(factorial(m * d), factorial(d) ** m), "q", order)


def l_series(order: int, m: int = 4, base: int = 16) -> TruncSeries:
    """(1 - base q)^(-1/m)"""
    one_minus = TruncSeries.from_list([1, -base], "q", order)
    return one_minus.power(Fraction(-1, m))


def base_series(geom: Geometry, order: int) -> Dict[str, TruncSeries]:
    """
    Named base series of a geometry.

    LocalP1P1 / twisted P^3: L, I1, C1, X, A2, T_minus_log_q.
    Hypersurface: L, I0 and, for m = 2, I1, I1_tilde, Y.
    """
    if geom.kind in (LOCAL_P1P1, TWISTED_P3):
        L = l_series(order)
        I1 = TruncSeries.from_function(
            lambda d: Fraction(2 * factorial(2 * d) * factorial(2 * d - 1), factorial(d) ** 4) if d else 0,
            "q", order)
        C1 = I1.d_op() + 1
        X = C1.d_op() / C1
        L4 = L ** 4
        A2 = (X + Fraction(1, 2) - L4 * Fraction(1, 4)) / L4
        return {"L": L, "I1": I1, "C1": C1, "X": X, "A2": A2, "T_minus_log_q": I1}
    if geom.kind == HYPERSURFACE:
        m, n = geom.m, geom.n
        out = {"L": l_series(order, m, m ** m), "I0": central_binomial_series(order, m)}
        if m == 2:
            rows = [(Fraction(factorial(2 * d), factorial(d) ** 2), d) for d in range(order + 1)]
            out["I1"] = TruncSeries.from_list([2 * c * (harmonic(2 * d) - harmonic(d)) for c, d in rows], "q", order)
            out["I1_tilde"] = TruncSeries.from_list([n * c * harmonic(2 * d) for c, d in rows], "q", order)
            out["Y"] = (out["I1_tilde"] / out["I0"]).d_op()
        return out
    raise ValueError(f"unknown geometry {geom.kind}")


def hypersurface_identities(series: Dict[str, TruncSeries], n: int) -> Dict[str, TruncSeries]:
    """Residuals of the three (2, n) closed forms; all zero when they hold."""
    order = series["I0"].orders[0]
    root = TruncSeries.from_list([1, -4], "q", order).power(Fraction(-1, 2))
    four_q = TruncSeries.from_list([0, 4], "q", order) * geometric(4, order)
    expected_y = (four_q - root * Fraction(1, 2) + Fraction(1, 2)) * n
    return {
        "I0": series["I0"] - root,
        "mirror": (series["I1"] / series["I0"]).d_op() + 1 - root,
        "Y": series["Y"] - expected_y,
    }


# ---------------------------------------------------------------------------
# Pairing data
# ---------------------------------------------------------------------------

@dataclass
class PairingData:
    """e_i, phi_i / phi^i restrictions and genus-one Hodge coefficients."""

    euler: Dict[Tuple[int, ...], object]
    phi: Dict[Tuple[int, ...], Dict[Tuple[int, ...], object]]
    phi_dual: Dict[Tuple[int, ...], Dict[Tuple[int, ...], object]]
    c: Dict[Tuple[int, ...], object]
    hodge_weights: Dict[Tuple[int, ...], Tuple[Tuple[object, ...], Tuple[object, ...]]]


def _product(values) -> object:
    out = 1
    for v in values:
        out = out * v
    return out


def pairing_data(geom: Geometry) -> PairingData:
    """
    Twisted Poincare pairing data.

    e_i = e(T_p) * prod(twist denominators...) in the convention
    e(T_p) / e(twist) where the twist is the ratio of numerator and
    denominator bundles; c_i solves 1 + c_i e(E) = prod e(E* x w)/w.

    Raises:
        DegenerateTorusDataError: if a tangent or twist weight vanishes
    """
    euler, c, hodge = {}, {}, {}
    for p in geom.points:
        weights = list(p.tangent) + list(p.twist_numerator) + list(p.twist_denominator)
        for w in weights:
            if not w:
                raise DegenerateTorusDataError(f"zero weight at {p.label}")
        if geom.kind == LOCAL_P1P1:
            # local CY3: every weight of T_p X enters the Hodge class
            e = _product(p.tangent)
            c[p.index] = -sum((Fraction(1) / w for w in p.tangent), 0)
            hodge[p.index] = (tuple(p.tangent), ())
        elif geom.kind == TWISTED_P3:
            e = _product(p.tangent) * _product(p.twist_numerator) / _product(p.twist_denominator)
            local = Geometry.local_p1p1().point(*p.index)
            c[p.index] = -sum((Fraction(1) / w for w in local.tangent), 0)
            hodge[p.index] = (tuple(local.tangent), ())
        else:
            e = _product(p.tangent) / _product(p.twist_denominator)
            c[p.index] = -sum((Fraction(1) / w for w in p.tangent), 0) + sum((Fraction(1) / w for w in p.twist_denominator), 0)
            hodge[p.index] = (tuple(p.tangent), tuple(p.twist_denominator))
        euler[p.index] = e
    indices = [p.index for p in geom.points]
    phi = {i: {j: (1 if i == j else 0) for j in indices} for i in indices}
    phi_dual = {i: {j: (euler[i] if i == j else 0) for j in indices} for i in indices}
    return PairingData(euler, phi, phi_dual, c, hodge)


def lagrange_basis(nodes: Sequence) -> List[List]:
    """
    Coefficients (in powers H^0..H^{k-1}) of the Lagrange polynomials
    prod_{j != r} (H - x_j)/(x_r - x_j) for distinct nodes x.
    """
    basis = []
    for r, xr in enumerate(nodes):
        poly = [1]
        denom = 1
        for j, xj in enumerate(nodes):
            if j == r:
                continue
            if xr == xj:
                raise DegenerateTorusDataError("coincident interpolation nodes")
            shifted = [0] * (len(poly) + 1)
            for k, a in enumerate(poly):
                shifted[k + 1] = shifted[k + 1] + a
                shifted[k] = shifted[k] - a * xj
            poly = shifted
            denom = denom * (xr - xj)
        inv = Fraction(1) / denom
        basis.append([a * inv for a in poly])
    return basis
