"""
z-Expansions of q-Series
Each q^d coefficient of an I- or S-function is a rational function of z.
InfinityExpansion keeps the expansion at z = infinity (variable w = 1/z);
OriginExpansion keeps the expansion at z = 0, storing q^d z^j as u^d z^(j+d)
so that poles of order <= d fit into an ordinary power series.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from src.series import InsufficientOrderError, NonNormalizedError, TruncSeries

Factor = Tuple[object, object]  # (a, b) meaning a + b*z
DegreeTerm = Tuple[List[Factor], List[Factor]]  # numerator, denominator factors


def _poly_mul(a: List, b: List, length: int) -> List:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if not x:
            continue
        for j, y in enumerate(b[: length - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def _poly_inverse(a: List, length: int) -> List:
    """Inverse of a univariate series with invertible a[0]."""
    inv0 = Fraction(1) / a[0]
    out = [0] * length
    out[0] = inv0
    for k in range(1, length):
        acc = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            if a[i] and out[k - i]:
                acc = acc + a[i] * out[k - i]
        out[k] = -acc * inv0 if acc else 0
    return out


# ---------------------------------------------------------------------------
# z = infinity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfinityExpansion:
    """Value z**shift * series(q..., w) with w = 1/z."""

    series: TruncSeries
    shift: int = 0

    @property
    def qvars(self) -> Tuple[str, ...]:
        return self.series.variables[:-1]

    @property
    def w_order(self) -> int:
        return self.series.orders[-1]

    @classmethod
    def from_terms(cls, terms: Dict[Tuple[int, ...], DegreeTerm], qvars: Sequence[str], q_orders: Sequence[int], w_order: int) -> "InfinityExpansion":
        """
        Build sum_d q^d * prod(num)/prod(den) from linear factors in z.

        Args:
            terms: degree multi-index -> (numerator factors, denominator factors)
            qvars: names of the q variables
            q_orders: truncation per q variable
            w_order: truncation in w = 1/z
        """
        length = w_order + 1
        per_degree = {}
        for degree, (num, den) in terms.items():
            poly = [1]
            shift = 0
            for a, b in num:
                if b:
                    poly = _poly_mul(poly, [b, a], length)
                    shift += 1
                else:
                    poly = _poly_mul(poly, [a], length)
            for a, b in den:
                if b:
                    poly = _poly_mul(poly, _poly_inverse([b, a], length), length)
                    shift -= 1
                else:
                    poly = _poly_mul(poly, [Fraction(1) / a], length)
            per_degree[degree] = (shift, poly)
        top = max(s for s, _ in per_degree.values())
        coeffs = {}
        for degree, (shift, poly) in per_degree.items():
            offset = top - shift
            for k, c in enumerate(poly):
                if c and k + offset <= w_order:
                    coeffs[tuple(degree) + (k + offset,)] = c
        variables = tuple(qvars) + ("w",)
        return cls(TruncSeries(variables, tuple(q_orders) + (w_order,), coeffs), top)

    def z_coefficient(self, e: int) -> TruncSeries:
        """Coefficient of z**e as a series in the q variables."""
        k = self.shift - e
        if k > self.w_order:
            raise InsufficientOrderError(f"z^{e} needs w-order {k}, have {self.w_order}")
        coeffs = {}
        if k >= 0:
            for exps, c in self.series.coeffs.items():
                if exps[-1] == k:
                    coeffs[exps[:-1]] = c
        return TruncSeries(self.qvars, self.series.orders[:-1], coeffs)

    def theta(self, weight, var: str) -> "InfinityExpansion":
        """Apply weight + z * var d/dvar."""
        w = TruncSeries.variable("w", self.series.variables, self.series.orders)
        return InfinityExpansion(w * self.series * weight + self.series.d_op(var), self.shift + 1)

    def times_q_series(self, c: TruncSeries) -> "InfinityExpansion":
        return InfinityExpansion(self.series * c.extend(self.series.variables, self.series.orders), self.shift)

    def inverse_z_series(self, var: str) -> TruncSeries:
        """
        The expansion as a series in the q variables and var = 1/z.

        Raises:
            NonNormalizedError: if a positive power of z carries a coefficient
        """
        coeffs = {}
        for exps, c in self.series.coeffs.items():
            k = exps[-1] - self.shift
            if k < 0:
                raise NonNormalizedError("inverse_z_series", f"z^{-k} term at {exps[:-1]}")
            coeffs[exps[:-1] + (k,)] = c
        orders = self.series.orders[:-1] + (self.w_order - self.shift,)
        if orders[-1] < 0:
            raise InsufficientOrderError(f"w-order {self.w_order} below shift {self.shift}")
        return TruncSeries(self.qvars + (var,), orders, coeffs)

    def times_z(self, power: int = 1) -> "InfinityExpansion":
        return InfinityExpansion(self.series, self.shift + power)

    def _aligned(self, other: "InfinityExpansion") -> Tuple[TruncSeries, TruncSeries, int]:
        top = max(self.shift, other.shift)
        w = TruncSeries.variable("w", self.series.variables, self.series.orders)
        left = self.series * (w ** (top - self.shift))
        right = other.series * (w ** (top - other.shift))
        return left, right, top

    def __add__(self, other: "InfinityExpansion") -> "InfinityExpansion":
        left, right, top = self._aligned(other)
        return InfinityExpansion(left + right, top)

    def __sub__(self, other: "InfinityExpansion") -> "InfinityExpansion":
        left, right, top = self._aligned(other)
        return InfinityExpansion(left - right, top)

    def __mul__(self, other):
        if isinstance(other, InfinityExpansion):
            return InfinityExpansion(self.series * other.series, self.shift + other.shift)
        return InfinityExpansion(self.series * other, self.shift)

    __rmul__ = __mul__

    def restrict(self, var: str) -> "InfinityExpansion":
        """Set a q variable to zero."""
        return InfinityExpansion(self.series.restrict(var), self.shift)

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def first_nonzero(self):
        """(z-exponent, q-exponents, coefficient) of a nonzero term, or None."""
        if self.series.is_zero():
            return None
        exps = min(self.series.coeffs, key=lambda e: (sum(e[:-1]), e[-1]))
        return self.shift - exps[-1], exps[:-1], self.series.coeffs[exps]


# ---------------------------------------------------------------------------
# z = 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OriginExpansion:
    """Value F(q/z, z) for the stored series F(u, z)."""

    series: TruncSeries

    @property
    def q_order(self) -> int:
        return self.series.orders[0]

    @property
    def z_order(self) -> int:
        return self.series.orders[1]

    @classmethod
    def from_terms(cls, terms: Dict[int, DegreeTerm], q_order: int, z_order: int) -> "OriginExpansion":
        """
        Build sum_d q^d * prod(num)/prod(den) expanded at z = 0.

        Raises:
            ValueError: if some q^d coefficient has a pole of order > d
        """
        length = z_order + 1
        coeffs = {}
        for d, (num, den) in terms.items():
            if d > q_order:
                continue
            scale = 1
            order = 0
            poly = [1]
            for a, b in num:
                if a:
                    scale = scale * a
                    poly = _poly_mul(poly, [1, b * (Fraction(1) / a)], length)
                else:
                    scale = scale * b
                    order += 1
            for a, b in den:
                if a:
                    inv = Fraction(1) / a
                    scale = scale * inv
                    poly = _poly_mul(poly, _poly_inverse([1, b * inv], length), length)
                else:
                    scale = scale * (Fraction(1) / b)
                    order -= 1
            offset = order + d
            if offset < 0:
                raise ValueError(f"q^{d} coefficient has a pole of order {-order} > {d}")
            for k, c in enumerate(poly):
                if c and k + offset <= z_order:
                    coeffs[(d, k + offset)] = c * scale
        return cls(TruncSeries(("u", "z"), (q_order, z_order), coeffs))

    @classmethod
    def from_q_series(cls, c: TruncSeries, z_order: int) -> "OriginExpansion":
        """A z-independent series sum c_d q^d."""
        return cls(TruncSeries(("u", "z"), (c.orders[0], z_order), {(d, d): v for (d,), v in c.coeffs.items()}))

    @classmethod
    def from_z_inverse(cls, c: TruncSeries, z_order: int) -> "OriginExpansion":
        """The series c(q)/z; needs c(0) = 0."""
        if c.constant_term():
            raise NonNormalizedError("from_z_inverse", "q^0 coefficient of a 1/z term must vanish")
        return cls(TruncSeries(("u", "z"), (c.orders[0], z_order), {(d, d - 1): v for (d,), v in c.coeffs.items()}))

    def z_coefficient(self, j: int) -> TruncSeries:
        """Coefficient of z**j as a q-series (valid to q-order z_order - j)."""
        order = min(self.q_order, self.z_order - j)
        if order < 0:
            raise InsufficientOrderError(f"z^{j} needs z-order above {self.z_order}")
        coeffs = {}
        for (d, k), c in self.series.coeffs.items():
            if k - d == j and d <= order:
                coeffs[(d,)] = c
        return TruncSeries(("q",), (order,), coeffs)

    def min_z_power(self) -> int:
        """Lowest z-exponent with a nonzero coefficient."""
        if self.series.is_zero():
            return 0
        return min(k - d for d, k in self.series.coeffs)

    def theta(self, weight) -> "OriginExpansion":
        """Apply weight + z * q d/dq."""
        z = TruncSeries.variable("z", self.series.variables, self.series.orders)
        return OriginExpansion(self.series * weight + z * self.series.d_op("u"))

    def times_q_series(self, c: TruncSeries) -> "OriginExpansion":
        return OriginExpansion(self.series * OriginExpansion.from_q_series(c, self.z_order).series)

    def __add__(self, other: "OriginExpansion") -> "OriginExpansion":
        return OriginExpansion(self.series + other.series)

    def __sub__(self, other: "OriginExpansion") -> "OriginExpansion":
        return OriginExpansion(self.series - other.series)

    def __mul__(self, other):
        if isinstance(other, OriginExpansion):
            return OriginExpansion(self.series * other.series)
        return OriginExpansion(self.series * other)

    __rmul__ = __mul__

    def log(self) -> "OriginExpansion":
        return OriginExpansion(self.series.log())

    def exp(self) -> "OriginExpansion":
        return OriginExpansion(self.series.exp())

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def q_z_series(self, z_depth: int, var: str = "z") -> TruncSeries:
        """
        Regular part as a series in (q, var) for an expansion without poles.

        Coefficients of var^j for j <= z_depth; q-order limited by z-order.
        """
        order = min(self.q_order, self.z_order - z_depth)
        if order < 0:
            raise InsufficientOrderError(f"z-depth {z_depth} exceeds z-order {self.z_order}")
        coeffs = {}
        for (d, k), c in self.series.coeffs.items():
            j = k - d
            if j < 0:
                raise NonNormalizedError("q_z_series", f"pole z^{j} at q^{d}")
            if j <= z_depth and d <= order:
                coeffs[(d, j)] = c
        return TruncSeries(("q", var), (order, z_depth), coeffs)
