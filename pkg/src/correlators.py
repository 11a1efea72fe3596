"""
Descendent Correlators with T-insertions
HodgeIntegralTable (the integral input data), the t-expansion of
<<psi^a_1, ..., psi^a_n | lambda>>_{g,n} at t_0 = 0, and its reduction to a
P-function in the genus-0 generators s_k = <<1, ..., 1>>_{0,k+3}.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
import sympy as sp

from src.intersection import (
    MAX_GENUS,
    hodge_table_entries,
    is_stable,
    multinomial,
    psi_intersection,
    reduce_lambda_monomial,
)
from src.scalars import to_fraction
from src.series import TruncSeries

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["g", "psi", "lambda", "n", "value"]

Key = Tuple[int, Tuple[int, ...], Tuple[int, ...]]


class MissingHodgeIntegralError(KeyError):
    def __init__(self, g: int, monomial: str):
        self.g = g
        self.monomial = monomial
        super().__init__(f"Hodge integral not provided: ({g}, {monomial})")

    def __str__(self) -> str:
        return self.args[0]


def _exponents(text: str) -> Tuple[int, ...]:
    text = str(text).strip()
    return tuple(int(x) for x in text.split()) if text and text != "nan" else ()


def _monomial_str(lam: Tuple[int, ...], psi: Tuple[int, ...]) -> str:
    parts = [f"lambda_{k + 1}^{e}" for k, e in enumerate(lam) if e]
    parts += [f"psi_{i + 1}^{a}" for i, a in enumerate(psi) if a]
    return " ".join(parts) or "1"


# ---------------------------------------------------------------------------
# Hodge integral table
# ---------------------------------------------------------------------------

class HodgeIntegralTable:
    """
    Read-only map (g, lambda exponents, sorted psi exponents) -> integral.

    Only dimension-correct entries are stored; lambda monomials are reduced
    by the genus <= 2 relations before lookup.
    """

    def __init__(self, entries: Optional[Dict[Key, Fraction]] = None, source: str = "memory"):
        self.entries: Dict[Key, Fraction] = {}
        self.source = source
        for (g, lam, psi), value in (entries or {}).items():
            self.entries[(g, tuple(lam), tuple(sorted(psi, reverse=True)))] = to_fraction(value)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def build_from_oracle(cls, max_genus: int = MAX_GENUS, max_markings: int = 6) -> "HodgeIntegralTable":
        return cls(hodge_table_entries(max_genus, max_markings), source="oracle")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "HodgeIntegralTable":
        """
        Read a table file: ';'-separated records g; psi; lambda; n; p/q with
        space-separated exponent lists.

        Raises:
            FileNotFoundError: if the file does not exist
            ValueError: on a malformed or dimension-incorrect record
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Hodge table not found: {path}")
        df = pd.read_csv(path, sep=";", dtype=str, keep_default_na=False)
        missing = [c for c in TABLE_COLUMNS if c not in df.columns]
        if missing:
            raise ValueError(f"Hodge table {path} lacks columns {missing}")
        entries = {}
        for row in df[TABLE_COLUMNS].to_dict("records"):
            g = int(row["g"])
            psi = _exponents(row["psi"])
            lam = _exponents(row["lambda"])
            if int(row["n"]) != len(psi):
                raise ValueError(f"record ({g}, {row['psi']}) declares n = {row['n']}")
            degree = sum((k + 1) * e for k, e in enumerate(lam)) + sum(psi)
            if degree != 3 * g - 3 + len(psi):
                raise ValueError(f"record ({g}, {_monomial_str(lam, psi)}) is not dimension-correct")
            entries[(g, lam, psi)] = Fraction(row["value"])
        logger.info("Loaded %d Hodge integrals from %s", len(entries), path)
        return cls(entries, source=str(path))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for (g, lam, psi), value in sorted(self.entries.items()):
            rows.append({
                "g": g,
                "psi": " ".join(str(a) for a in psi),
                "lambda": " ".join(str(e) for e in lam),
                "n": len(psi),
                "value": f"{value.numerator}/{value.denominator}",
            })
        return pd.DataFrame(rows, columns=TABLE_COLUMNS)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, sep=";", index=False)
        return path

    def integral(self, g: int, lam: Sequence[int], psi: Sequence[int]) -> Fraction:
        """
        Integral of lambda^lam * prod psi_i^{a_i} over the genus-g moduli space.

        Raises:
            MissingHodgeIntegralError: for a dimension-correct entry the table
                does not hold
        """
        psi = tuple(sorted(psi, reverse=True))
        total = Fraction(0)
        for mono, coeff in reduce_lambda_monomial(g, tuple(lam)).items():
            degree = sum((k + 1) * e for k, e in enumerate(mono))
            if not is_stable(g, len(psi)) or degree + sum(psi) != 3 * g - 3 + len(psi):
                continue
            key = (g, mono, psi)
            if key not in self.entries:
                raise MissingHodgeIntegralError(g, _monomial_str(mono, psi))
            total += coeff * self.entries[key]
        return total


# ---------------------------------------------------------------------------
# t-expansion
# ---------------------------------------------------------------------------

def insertion_budget(g: int, psi: Sequence[int], lam: Sequence[int] = ()) -> int:
    """D = 3g - 3 + n - sum(a) - deg(lambda): total weight of the t_j, j >= 2, insertions."""
    degree = sum((k + 1) * e for k, e in enumerate(lam))
    return 3 * g - 3 + len(psi) - sum(psi) - degree


def markings_needed(g: int, psi: Sequence[int], lam: Sequence[int] = ()) -> int:
    """Largest marking count among the integrals the t-expansion reads."""
    return len(psi) + max(insertion_budget(g, psi, lam), 0)


def _weighted_multisets(total: int, smallest: int = 1):
    """Non-increasing tuples of parts >= smallest summing to total."""
    if total == 0:
        yield ()
        return
    for first in range(total, smallest - 1, -1):
        for tail in _weighted_multisets(total - first, smallest):
            if not tail or tail[0] <= first:
                yield (first,) + tail


def _symmetry(parts: Sequence[int]) -> int:
    out = 1
    for mult in Counter(parts).values():
        out *= factorial(mult)
    return out


def correlator_terms(g: int, psi: Sequence[int], lam: Sequence[int], integral) -> Dict[Tuple[int, ...], Fraction]:
    """
    Coefficients of the correlator at t_0 = 0 and t_1 = 0.

    Keys are the insertion weights (j - 1 for each t_j, sorted
    non-increasing); the full correlator multiplies each term by
    (1 - t_1)^{-(2g - 2 + n + m)}, m the number of insertions.
    """
    budget = insertion_budget(g, psi, lam)
    if budget < 0:
        return {}
    out = {}
    for weights in _weighted_multisets(budget):
        value = integral(g, tuple(lam), tuple(psi) + tuple(w + 1 for w in weights))
        if value:
            out[weights] = Fraction(value) / _symmetry(weights)
    return out


def genus_zero_integral(g: int, lam, psi) -> Fraction:
    """prod psi_i^{a_i} over the genus-0 moduli space: (N-3)! / prod a_i!"""
    if g != 0 or any(lam):
        raise ValueError("genus_zero_integral handles genus 0 without lambda classes")
    return Fraction(multinomial(len(psi) - 3, psi)) if len(psi) >= 3 else Fraction(0)


def evaluate_correlator(g: int, psi: Sequence[int], lam: Sequence[int], t: Sequence[TruncSeries], integral) -> TruncSeries:
    """
    <<psi^a_1, ..., psi^a_n | lambda>>_{g,n} at t_0 = 0 as a series, by
    direct expansion of the T-insertions.

    Args:
        t: [t_1, t_2, ...] as series in a common variable set; t_1 must have
            zero constant term
    """
    one = TruncSeries.constant(1, t[0].variables, t[0].orders)
    s = (one - t[0]).inverse()
    total = TruncSeries.zero(one.variables, one.orders)
    base = 2 * g - 2 + len(psi)
    for weights, coeff in correlator_terms(g, psi, lam, integral).items():
        if any(w >= len(t) for w in weights):
            raise ValueError(f"t_{max(weights) + 1} needed but only {len(t)} values given")
        term = s ** (base + len(weights)) * coeff
        for w in weights:
            term = term * t[w]
        total = total + term
    return total


def s_series(t: Sequence[TruncSeries], k_max: int) -> List[TruncSeries]:
    """s_k = <<1, ..., 1>>_{0,k+3} for k = 0..k_max."""
    return [evaluate_correlator(0, (0,) * (k + 3), (), t, genus_zero_integral) for k in range(k_max + 1)]


# ---------------------------------------------------------------------------
# P-functions
# ---------------------------------------------------------------------------

@dataclass
class PFunction:
    """
    sum_pi c_pi * prod_{k in pi} s_k * s_0^{e_pi} over partitions pi of D.

    e_pi = 2g - 2 + n - D - len(pi) makes every term carry the same power of
    (1 - t_1).
    """

    g: int
    n: int
    budget: int
    terms: Dict[Tuple[int, ...], Tuple[Fraction, int]] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def symbols(self) -> List[sp.Symbol]:
        return list(sp.symbols(f"s0:{max(self.budget, 0) + 1}"))

    @property
    def expression(self) -> sp.Expr:
        s = self.symbols
        expr = sp.Integer(0)
        for parts, (coeff, e) in self.terms.items():
            term = sp.Rational(coeff.numerator, coeff.denominator) * s[0] ** e
            for k in parts:
                term *= s[k]
            expr += term
        return expr

    def evaluate(self, s: Sequence[TruncSeries]) -> TruncSeries:
        """Value at s-series s[0..D]; s[0] must be a unit."""
        inv0 = s[0].inverse()
        total = TruncSeries.zero(s[0].variables, s[0].orders)
        for parts, (coeff, e) in self.terms.items():
            term = (s[0] ** e if e >= 0 else inv0 ** (-e)) * coeff
            for k in parts:
                term = term * s[k]
            total = total + term
        return total

    def __str__(self) -> str:
        return str(self.expression)


def _multiply_terms(left: Dict[Tuple[int, ...], Fraction], right: Dict[Tuple[int, ...], Fraction]) -> Dict[Tuple[int, ...], Fraction]:
    out: Dict[Tuple[int, ...], Fraction] = {}
    for a, x in left.items():
        for b, y in right.items():
            key = tuple(sorted(a + b, reverse=True))
            out[key] = out.get(key, 0) + x * y
    return out


def _s_terms(k: int) -> Dict[Tuple[int, ...], Fraction]:
    return correlator_terms(0, (0,) * (k + 3), (), genus_zero_integral)


def reduce_correlator(g: int, psi: Sequence[int], lam: Sequence[int], table: HodgeIntegralTable) -> PFunction:
    """
    The P-function with <<psi^a | lambda>>_{g,n} = P(s_0, s_1, ...) at t_0 = 0.

    Both sides share the (1 - t_1) scaling, so the coefficients are fixed by
    matching t_2, t_3, ... monomials at t_1 = 0.

    Raises:
        ValueError: outside the stable range
        MissingHodgeIntegralError: if the table lacks a needed integral
    """
    n = len(psi)
    if not is_stable(g, n):
        raise ValueError(f"({g}, {n}) is outside the stable range")
    budget = insertion_budget(g, psi, lam)
    result = PFunction(g, n, budget)
    if budget < 0:
        return result
    target = correlator_terms(g, psi, lam, table.integral)
    partitions = list(_weighted_multisets(budget))
    columns = []
    for parts in partitions:
        product: Dict[Tuple[int, ...], Fraction] = {(): Fraction(1)}
        for k in parts:
            product = _multiply_terms(product, _s_terms(k))
        columns.append(product)
    matrix = sp.Matrix([[sp.Rational(str(col.get(row, 0))) for col in columns] for row in partitions])
    rhs = sp.Matrix([sp.Rational(str(target.get(row, 0))) for row in partitions])
    solution = matrix.LUsolve(rhs)
    for parts, value in zip(partitions, solution):
        if value != 0:
            result.terms[parts] = (to_fraction(value), 2 * g - 2 + n - budget - len(parts))
    logger.debug("P-function (%d, %s, %s): %d terms", g, tuple(psi), tuple(lam), len(result.terms))
    return result


# ---------------------------------------------------------------------------
# Two-point closed form
# ---------------------------------------------------------------------------

def two_point_residual(order: int) -> TruncSeries:
    """
    <<1/(x - psi), 1/(y - psi)>>_{0,2} at t_0 = u minus
    XY (e^{u(X + Y)} - 1)/(X + Y), as a (u, X, Y) series with X = 1/x and
    Y = 1/y. Zero to truncation.
    """
    variables, orders = ("u", "X", "Y"), (order, order + 1, order + 1)
    coeffs = {}
    for m in range(1, order + 1):
        for a in range(m):
            value = psi_intersection(0, [a, m - 1 - a] + [0] * m) / factorial(m)
            if value:
                coeffs[(m, a + 1, m - a)] = value
    correlator = TruncSeries(variables, orders, coeffs)
    closed = {}
    for m in range(1, order + 1):
        for a in range(m):
            # XY (X + Y)^{m-1} u^m / m!
            closed[(m, a + 1, m - a)] = Fraction(multinomial(m - 1, (a, m - 1 - a)), factorial(m))
    return correlator - TruncSeries(variables, orders, closed)
