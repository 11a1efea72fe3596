"""
Genus <= 2 Graph Sums for the Local P^1 x P^1 Quasimap Potential
Local correlators from the twisted P^3 S-tower, vertex / edge / leg
contributions, assembly of F_g and F_{g,n}[H, ...] at q1 = q2 = q, and the
genus-2 anomaly checks.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from src.asymptotics import LOW_ORDER, NO_LIFT, AsymptoticExpansion, damped_tower, tower_asymptotics
from src.birkhoff import SOperatorTower, build_s_tower, divide_by_sum, embed_pair
from src.correlators import HodgeIntegralTable, PFunction, reduce_correlator, s_series
from src.geometry import Geometry, base_series, i_twisted_p3, l_series, pairing_data
from src.graphs import DecoratedGraph, enumerate_graphs, stable_topologies
from src.scalars import is_rational_scalar, to_fraction
from src.series import InsufficientOrderError, TruncSeries, fit_in_polynomial_ring

logger = logging.getLogger(__name__)

N_POINTS = 4
TWIST_DEPTH = 4


class ZDepthError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__(f"insufficient z-depth{': ' + detail if detail else ''}")


def _z_coefficient(series: TruncSeries, j: int) -> TruncSeries:
    """Coefficient of var^j in a (q, var) series."""
    if j > series.orders[1]:
        raise ZDepthError(f"z^{j} requested, depth {series.orders[1]}")
    return TruncSeries(("q",), (series.orders[0],), {(d,): c for (d, k), c in series.coeffs.items() if k == j})


def _xy_coefficient(series: TruncSeries, a: int, b: int) -> TruncSeries:
    if a > series.orders[1] or b > series.orders[2]:
        raise ZDepthError(f"x^{a} y^{b} requested, edge depth {series.orders[1]}")
    return TruncSeries(("q",), (series.orders[0],), {(d,): c for (d, i, j), c in series.coeffs.items() if (i, j) == (a, b)})


def hodge_class(tangent: Sequence, g: int) -> Dict[Tuple[int, ...], object]:
    """
    prod_w (1 - lambda_1/w + lambda_2/w^2 - ...) truncated to lambda_g, as
    exponent tuple of (lambda_1, ..., lambda_g) -> coefficient.
    """
    out: Dict[Tuple[int, ...], object] = {(0,) * g: 1}
    for w in tangent:
        factor = {(0,) * g: 1}
        for k in range(1, g + 1):
            mono = tuple(1 if i == k - 1 else 0 for i in range(g))
            factor[mono] = Fraction((-1) ** k) / (w ** k)
        nxt: Dict[Tuple[int, ...], object] = {}
        for a, x in out.items():
            for b, y in factor.items():
                key = tuple(i + j for i, j in zip(a, b))
                nxt[key] = nxt[key] + x * y if key in nxt else x * y
        out = {k: v for k, v in nxt.items() if v}
    return out


# ---------------------------------------------------------------------------
# Local correlators
# ---------------------------------------------------------------------------

@dataclass
class LocalCorrelatorProvider:
    """
    Per fixed point i of P^1 x P^1 (matched with xi_i = zeta_4^i): the
    translation t_1 = 1 - R_00, t_{k+1} = -(-1)^k R_0k / xi^k, the genus-0
    generators s_k, U_i = mu xi_i and the damped S-series
    F_a = e^{-U/z} S(H^a) as (q, z) series.
    """

    order: int
    z_depth: int
    xi: Dict[int, object]
    euler: Dict[int, object]
    tangent: Dict[int, Tuple]
    asymptotics: Dict[int, AsymptoticExpansion]
    t: Dict[int, List[TruncSeries]]
    s: Dict[int, List[TruncSeries]]
    damped: Dict[int, List[TruncSeries]]
    tower: Optional[SOperatorTower] = None

    @classmethod
    def from_twisted_p3(cls, order: int, z_depth: int) -> "LocalCorrelatorProvider":
        """
        Build every series from the twisted P^3 I-function.

        Raises:
            ZDepthError: for z_depth < 1
        """
        if z_depth < 1:
            raise ZDepthError(f"z-depth {z_depth}")
        infinity = build_s_tower(i_twisted_p3(order, TWIST_DEPTH + 1))
        origin = build_s_tower(i_twisted_p3(order, order + z_depth + 1, "origin"), c_series=infinity.c)
        L = l_series(order)
        twisted = pairing_data(Geometry.twisted_p3())
        local = Geometry.local_p1p1()
        xi, euler, tangent, asym, t, s, damped = {}, {}, {}, {}, {}, {}, {}
        for p in origin.stages[0].points():
            i = p[0]
            exp = tower_asymptotics(origin, p, z_depth, L)
            xi[i] = exp.xi
            euler[i] = twisted.euler[p]
            tangent[i] = local.point(i).tangent
            asym[i] = exp
            row = exp.rows[0]
            t[i] = [1 - row[0]] + [row[k] * (-((-1) ** k)) / (exp.xi ** k) for k in range(1, z_depth + 1)]
            s[i] = s_series(t[i], z_depth - 1)
            damped[i] = damped_tower(origin, p, z_depth)
        logger.info("Local correlators built at %d points (q^%d, z-depth %d)", len(xi), order, z_depth)
        return cls(order, z_depth, xi, euler, tangent, asym, t, s, damped, origin)

    def u_residuals(self, L: TruncSeries) -> Dict[int, TruncSeries]:
        """1 + D mu - L at every point."""
        return {i: exp.mu.d_op() + 1 - L for i, exp in self.asymptotics.items()}


# ---------------------------------------------------------------------------
# Contributions
# ---------------------------------------------------------------------------

class GraphSum:
    """
    Vertex, edge and leg terms of the localization graph sum and their
    assembly over decorated graphs.
    """

    def __init__(self, provider: LocalCorrelatorProvider, table: HodgeIntegralTable):
        self.provider = provider
        self.table = table
        self._p_functions: Dict[Tuple, PFunction] = {}
        self._vertices: Dict[Tuple, TruncSeries] = {}
        self._edges: Dict[Tuple[int, int], TruncSeries] = {}
        self._one = TruncSeries.constant(1, ("q",), (provider.order,))

    def p_function(self, g: int, a: Tuple[int, ...], lam: Tuple[int, ...]) -> PFunction:
        key = (g, tuple(sorted(a, reverse=True)), lam)
        if key not in self._p_functions:
            self._p_functions[key] = reduce_correlator(g, key[1], lam, self.table)
        return self._p_functions[key]

    def vertex_contribution(self, g: int, a: Sequence[int], point: int) -> TruncSeries:
        """
        e_p^{g-1} sum_mono c_mono P^{a, mono}_{g,n}(s) with the Hodge class
        expanded in lambda monomials; a holds the psi exponents A - 1.

        Raises:
            ZDepthError: if a P-function needs s_k beyond the provider
        """
        key = (g, tuple(sorted(a, reverse=True)), point)
        if key in self._vertices:
            return self._vertices[key]
        s = self.provider.s[point]
        total = TruncSeries.zero(("q",), (self.provider.order,))
        for mono, coeff in hodge_class(self.provider.tangent[point], g).items():
            pf = self.p_function(g, key[1], mono)
            if pf.is_zero():
                continue
            if pf.budget >= len(s):
                raise ZDepthError(f"s_{pf.budget} needed at genus {g}")
            total = total + pf.evaluate(s) * coeff
        euler = self.provider.euler[point]
        value = total * (euler ** (g - 1) if g >= 1 else Fraction(1) / euler)
        self._vertices[key] = value
        return value

    def edge_series(self, i: int, j: int) -> TruncSeries:
        """
        (N_ij(x, y) - delta_ij e_i) / (x + y) with
        N_ij = -sum_{a+b=3} F_a^(i)(x) F_b^(j)(y); a (q, x, y) series.
        """
        if (i, j) not in self._edges:
            left, right = self.provider.damped[i], self.provider.damped[j]
            numerator = None
            for a in range(TWIST_DEPTH):
                x, y = embed_pair(left[a], right[TWIST_DEPTH - 1 - a], ("x", "y"))
                term = -(x * y)
                numerator = term if numerator is None else numerator + term
            if i == j:
                numerator = numerator - self.provider.euler[i]
            self._edges[(i, j)] = divide_by_sum(numerator, "x", "y")
        return self._edges[(i, j)]

    def edge_contribution(self, i: int, j: int, b1: int, b2: int) -> TruncSeries:
        """(-1)^{b1+b2} [x^{b1-1} y^{b2-1}] of the edge series."""
        return _xy_coefficient(self.edge_series(i, j), b1 - 1, b2 - 1) * ((-1) ** (b1 + b2))

    def edge_x_derivative(self, i: int, j: int, b1: int, b2: int) -> TruncSeries:
        """
        d/dX of edge_contribution with R_2k = Q_2k - R_1,k-1 X / L:
        (-1)^{b1+b2} (C_1^2 / L^4) [F_1^(i)]_{b1-1} [F_1^(j)]_{b2-1}.
        """
        f1i = _z_coefficient(self.provider.damped[i][1], b1 - 1)
        f1j = _z_coefficient(self.provider.damped[j][1], b2 - 1)
        return f1i * f1j * self.edge_scale() * ((-1) ** (b1 + b2))

    def edge_scale(self) -> TruncSeries:
        """C_1^2 / L^4"""
        c1 = self.provider.tower.c[1]
        return c1 * c1 / (l_series(self.provider.order) ** 4)

    def leg_contribution(self, point: int, a: int, class_power: int = 1) -> TruncSeries:
        """(-1)^{a-1} [z^{a-1}] e^{-U/z} S_p(H^class_power)."""
        if not 0 <= class_power < TWIST_DEPTH:
            raise ValueError(f"class power {class_power} outside 0..{TWIST_DEPTH - 1}")
        return _z_coefficient(self.provider.damped[point][class_power], a - 1) * ((-1) ** (a - 1))

    # -- assembly ----------------------------------------------------------
    def _vertex_choices(self, graph: DecoratedGraph, v: int) -> List[Tuple[Tuple[int, ...], TruncSeries]]:
        g, val = graph.genera[v], graph.valence(v)
        dim = 3 * g - 3 + val
        out = []
        for a in product(range(dim + 1), repeat=val):
            if sum(a) > dim:
                continue
            value = self.vertex_contribution(g, a, graph.labels[v])
            if not value.is_zero():
                out.append((a, value))
        return out

    def graph_contribution(self, graph: DecoratedGraph, classes: Sequence[int] = (), derivative: bool = False) -> TruncSeries:
        """
        sum_A prod_v prod_e prod_l over flag assignments A, divided by the
        automorphism order; with derivative=True the X-derivative (one edge
        differentiated at a time).
        """
        total = TruncSeries.zero(("q",), (self.provider.order,))
        if derivative and not graph.edges:
            return total
        flags = [graph.flags(v) for v in range(graph.n_vertices)]
        choices = [self._vertex_choices(graph, v) for v in range(graph.n_vertices)]
        for combo in product(*choices):
            weight: Dict[Tuple[str, int, int], int] = {}
            value = self._one
            for v, (a, vertex_value) in enumerate(combo):
                value = value * vertex_value
                for flag, exponent in zip(flags[v], a):
                    weight[flag] = exponent + 1
            for i, vertex in enumerate(graph.legs):
                value = value * self.leg_contribution(graph.labels[vertex], weight[("leg", i, 0)], classes[i])
            edge_terms = []
            for e, (u, w) in enumerate(graph.edges):
                args = (graph.labels[u], graph.labels[w], weight[("edge", e, 0)], weight[("edge", e, 1)])
                edge_terms.append((self.edge_contribution(*args), args))
            if derivative:
                for k in range(len(edge_terms)):
                    term = value * self.edge_x_derivative(*edge_terms[k][1])
                    for other, (edge_value, _) in enumerate(edge_terms):
                        if other != k:
                            term = term * edge_value
                    total = total + term
            else:
                for edge_value, _ in edge_terms:
                    value = value * edge_value
                total = total + value
        return total * Fraction(1, graph.automorphisms)

    def assemble_fg(self, g: int, classes: Sequence[int] = (), derivative: bool = False, dedupe: bool = True) -> TruncSeries:
        """
        F_g (no classes) or F_{g,n}[H^c_1, ..., H^c_n] at q1 = q2 = q.

        dedupe=False sums every labelling of each topology weighted by the
        topology's automorphism order instead of the decorated-graph orbits.
        """
        n = len(classes)
        total = TruncSeries.zero(("q",), (self.provider.order,))
        if dedupe:
            graphs = enumerate_graphs(g, n, N_POINTS)
        else:
            graphs = []
            for topology in stable_topologies(g, n):
                for labels in product(range(N_POINTS), repeat=topology.n_vertices):
                    graphs.append(DecoratedGraph(topology.genera, topology.edges, topology.legs, labels, topology.automorphisms))
        for graph in graphs:
            total = total + self.graph_contribution(graph, classes, derivative)
        logger.info("F(%d, %d): %d graphs summed", g, n, len(graphs))
        return _rational_if_possible(total)


def _rational_if_possible(series: TruncSeries) -> TruncSeries:
    if all(is_rational_scalar(c) for c in series.coeffs.values()):
        return series.map_coefficients(to_fraction)
    return series


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def edge_derivative_residuals(engine: GraphSum, max_flag: int) -> Dict[str, TruncSeries]:
    """
    d Cont(e)/dX against (-1)^{k+l} R_1,k-1 R_1,l-1 / (L^2 xi_i^{k-2} xi_j^{l-2})
    for every pair of points and flags k, l <= max_flag.
    """
    L2 = l_series(engine.provider.order) ** 2
    out = {}
    for i, j in product(range(N_POINTS), repeat=2):
        ri, rj = engine.provider.asymptotics[i], engine.provider.asymptotics[j]
        for k, l in product(range(1, max_flag + 1), repeat=2):
            expected = ri.r(1, k - 1) * rj.r(1, l - 1) / L2 * ((-1) ** (k + l))
            expected = expected * (ri.xi ** (2 - k)) * (rj.xi ** (2 - l))
            out[f"{i}{j} {k}{l}"] = engine.edge_x_derivative(i, j, k, l) - expected
    return out


def edge_symmetry_residuals(engine: GraphSum, max_flag: int) -> Dict[str, TruncSeries]:
    """Cont(e; b1, b2; i, j) - Cont(e; b2, b1; j, i)."""
    out = {}
    for i, j in product(range(N_POINTS), repeat=2):
        for b1, b2 in product(range(1, max_flag + 1), repeat=2):
            out[f"{i}{j} {b1}{b2}"] = engine.edge_contribution(i, j, b1, b2) - engine.edge_contribution(j, i, b2, b1)
    return out


def _lift(target: TruncSeries, L: TruncSeries, other: TruncSeries, window: Tuple[int, int], degree: int, margin: int) -> Dict:
    try:
        fit = fit_in_polynomial_ring(target.map_coefficients(to_fraction), L, window, other, degree, margin)
    except InsufficientOrderError:
        return {"ok": False, "status": LOW_ORDER}
    except TypeError:
        return {"ok": False, "status": "non-rational coefficients"}
    if fit is None:
        return {"ok": False, "status": NO_LIFT}
    return {"ok": True, "status": "fit", "coefficients": fit}


def divisor_residual(f11: TruncSeries, f12: TruncSeries, C1: TruncSeries) -> TruncSeries:
    """
    F_{1,2}[H, H] - (1/C_1) D F_{1,1}[H] with its constant term removed;
    d/dT = (1/C_1) D along the mirror coordinate T = log q + I_1.
    """
    residual = f12 - f11.d_op() / C1
    return residual - residual.constant_term()


@dataclass
class AnomalyReport:
    order: int
    f2: TruncSeries
    f11: TruncSeries
    f12: TruncSeries
    lhs: TruncSeries
    rhs: TruncSeries
    residual: TruncSeries
    lift: Dict = field(default_factory=dict)
    derivative_lift: Dict = field(default_factory=dict)
    divisor_residual: Optional[TruncSeries] = None

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()


def anomaly_and_polynomiality(engine: GraphSum, window: Tuple[int, int] = (-4, 8), degree: int = 3, margin: int = 5) -> AnomalyReport:
    """
    (L^4 / C_1^2) dF_2/dX against F_{1,1}[H]^2 / 2 + F_{1,2}[H, H] / 2, plus
    the divisor equation between F_{1,1} and F_{1,2}, and the attempted lifts
    F_2 in Q[L^{+-1}][A_2] and C_1 F_{1,1} in Q[L^{+-1}][X].
    """
    order = engine.provider.order
    series = base_series(Geometry.twisted_p3(), order)
    L, C1, X, A2 = series["L"], series["C1"], series["X"], series["A2"]
    f2 = engine.assemble_fg(2)
    df2 = engine.assemble_fg(2, derivative=True)
    f11 = engine.assemble_fg(1, (1,))
    f12 = engine.assemble_fg(1, (1, 1))
    lhs = _rational_if_possible(df2 / engine.edge_scale())
    rhs = (f11 * f11 + f12) * Fraction(1, 2)
    residual = lhs - rhs
    report = AnomalyReport(order, f2, f11, f12, lhs, rhs, residual)
    report.lift = _lift(f2, L, A2, window, degree, margin)
    report.derivative_lift = _lift(f11 * C1, L, X, window, 1, margin)
    report.divisor_residual = divisor_residual(f11, f12, C1)
    if report.passed:
        logger.info("genus-2 anomaly holds through q^%d", order)
    else:
        logger.warning("genus-2 anomaly residual: %s", residual.first_nonzero())
    return report
