"""
Truncated Power Series
Sparse multivariate truncated series over exact scalars, analytic
operations and overdetermined exact fits.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from src.scalars import EpsLaurent, to_fraction

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class SeriesError(ValueError):
    """Base class for exact-algebra failures."""


class NonUnitDivisorError(SeriesError):
    def __init__(self, detail: str = ""):
        super().__init__(f"non-unit divisor{': ' + detail if detail else ''}")


class VariableMismatchError(SeriesError):
    def __init__(self, left, right):
        super().__init__(f"variable mismatch: {left} vs {right}")


class NonNormalizedError(SeriesError):
    def __init__(self, op: str, detail: str = ""):
        super().__init__(f"non-normalized argument for {op}{': ' + detail if detail else ''}")


class InsufficientOrderError(SeriesError):
    def __init__(self, detail: str = ""):
        super().__init__(f"insufficient truncation order{': ' + detail if detail else ''}")


class LimitError(SeriesError):
    def __init__(self, exponent, pole_order: int):
        self.exponent = exponent
        self.pole_order = pole_order
        super().__init__(
            f"limit does not exist: eps-pole of order {pole_order} at exponent {exponent}"
        )


class RegulatorError(SeriesError):
    def __init__(self, values):
        super().__init__(f"non-generic regulator: {list(values)}")


# ---------------------------------------------------------------------------
# TruncSeries
# ---------------------------------------------------------------------------

class TruncSeries:
    """
    Truncated power series in named variables.

    Coefficients are stored sparsely; exponents above a variable's order are
    never stored and zero coefficients are dropped, so equality is structural.
    """

    __slots__ = ("variables", "orders", "coeffs")

    def __init__(self, variables: Sequence[str], orders: Sequence[int], coeffs: Optional[Dict[Exponent, object]] = None):
        if len(variables) != len(orders):
            raise ValueError("one truncation order per variable is required")
        self.variables = tuple(variables)
        self.orders = tuple(int(o) for o in orders)
        clean: Dict[Exponent, object] = {}
        for exps, c in (coeffs or {}).items():
            if c and all(e <= o for e, o in zip(exps, self.orders)):
                clean[tuple(exps)] = c
        self.coeffs = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, value, variables: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        return cls(variables, orders, {(0,) * len(variables): value})

    @classmethod
    def zero(cls, variables: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        return cls(variables, orders, {})

    @classmethod
    def variable(cls, name: str, variables: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, orders, {exps: 1})

    @classmethod
    def from_list(cls, values: Iterable, var: str = "q", order: Optional[int] = None) -> "TruncSeries":
        values = list(values)
        if order is None:
            order = len(values) - 1
        return cls((var,), (order,), {(d,): c for d, c in enumerate(values)})

    @classmethod
    def from_function(cls, func: Callable[[int], object], var: str = "q", order: int = 0) -> "TruncSeries":
        """Univariate series whose q^d coefficient is func(d)."""
        return cls((var,), (order,), {(d,): func(d) for d in range(order + 1)})

    # -- basic access ------------------------------------------------------
    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableMismatchError(self.variables, var) from None

    def coefficient(self, *exps: int):
        return self.coeffs.get(tuple(exps), 0)

    def coefficients(self) -> List:
        """Dense coefficient list of a univariate series."""
        if len(self.variables) != 1:
            raise ValueError("coefficients() needs a univariate series")
        return [self.coeffs.get((d,), 0) for d in range(self.orders[0] + 1)]

    def constant_term(self):
        return self.coeffs.get((0,) * len(self.variables), 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def first_nonzero(self) -> Optional[Tuple[Exponent, object]]:
        """Lowest nonzero coefficient in graded lexicographic order."""
        if not self.coeffs:
            return None
        key = min(self.coeffs, key=lambda e: (sum(e), e))
        return key, self.coeffs[key]

    def truncate(self, orders: Sequence[int]) -> "TruncSeries":
        orders = tuple(min(a, b) for a, b in zip(self.orders, orders))
        return TruncSeries(self.variables, orders, self.coeffs)

    def map_coefficients(self, func: Callable) -> "TruncSeries":
        return TruncSeries(self.variables, self.orders, {e: func(c) for e, c in self.coeffs.items()})

    # -- ring operations ---------------------------------------------------
    def _check(self, other: "TruncSeries"):
        if self.variables != other.variables:
            raise VariableMismatchError(self.variables, other.variables)

    def _lift(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return TruncSeries.constant(other, self.variables, self.orders)

    def __add__(self, other):
        other = self._lift(other)
        orders = tuple(min(a, b) for a, b in zip(self.orders, other.orders))
        coeffs = dict(self.coeffs)
        for e, c in other.coeffs.items():
            coeffs[e] = coeffs[e] + c if e in coeffs else c
        return TruncSeries(self.variables, orders, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.variables, self.orders, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            if not other:
                return TruncSeries(self.variables, self.orders)
            return TruncSeries(self.variables, self.orders, {e: c * other for e, c in self.coeffs.items()})
        self._check(other)
        orders = tuple(min(a, b) for a, b in zip(self.orders, other.orders))
        coeffs: Dict[Exponent, object] = {}
        right = list(other.coeffs.items())
        for e1, c1 in self.coeffs.items():
            if any(a > o for a, o in zip(e1, orders)):
                continue
            for e2, c2 in right:
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(a > o for a, o in zip(e, orders)):
                    continue
                term = c1 * c2
                coeffs[e] = coeffs[e] + term if e in coeffs else term
        return TruncSeries(self.variables, orders, coeffs)

    def __rmul__(self, other):
        return self * other

    def _nilpotent_sum(self, weights: Callable[[int], object], nilpotent: "TruncSeries") -> "TruncSeries":
        """sum_k weights(k) * nilpotent**k until the powers vanish."""
        total = TruncSeries.constant(weights(0), self.variables, self.orders)
        power = TruncSeries.constant(1, self.variables, self.orders)
        k = 0
        while True:
            k += 1
            power = power * nilpotent
            if power.is_zero():
                return total
            w = weights(k)
            if w:
                total = total + power * w
        return total

    def inverse(self) -> "TruncSeries":
        c0 = self.constant_term()
        if not c0:
            raise NonUnitDivisorError(f"constant term of {self.variables} series vanishes")
        c0_inv = Fraction(1) / c0
        nilpotent = self * c0_inv - 1
        result = self._nilpotent_sum(lambda k: 1 if k % 2 == 0 else -1, nilpotent)
        return result * c0_inv

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return self * other.inverse()
        if not other:
            raise NonUnitDivisorError("scalar zero")
        return self * (Fraction(1) / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return self.power(exponent)
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = TruncSeries.constant(1, self.variables, self.orders)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            if self.variables != other.variables:
                return False
            orders = tuple(min(a, b) for a, b in zip(self.orders, other.orders))
            return self.truncate(orders).coeffs == other.truncate(orders).coeffs
        return self == self._lift(other)

    __hash__ = None

    # -- analytic operations -----------------------------------------------
    def exp(self) -> "TruncSeries":
        if self.constant_term():
            raise NonNormalizedError("exp", "constant term must vanish")
        factorials = [Fraction(1)]

        def weight(k):
            while len(factorials) <= k:
                factorials.append(factorials[-1] / len(factorials))
            return factorials[k]

        return self._nilpotent_sum(weight, self)

    def log(self) -> "TruncSeries":
        if self.constant_term() != 1:
            raise NonNormalizedError("log", "constant term must be 1")
        nilpotent = self - 1
        return self._nilpotent_sum(lambda k: Fraction(0) if k == 0 else Fraction((-1) ** (k + 1), k), nilpotent)

    def power(self, exponent) -> "TruncSeries":
        if self.constant_term() != 1:
            raise NonNormalizedError("pow", "constant term must be 1")
        exponent = to_fraction(exponent)
        return (self.log() * exponent).exp()

    # -- derivations -------------------------------------------------------
    def d_op(self, var: str = "q") -> "TruncSeries":
        """Euler derivative var * d/dvar."""
        i = self._index(var)
        return TruncSeries(self.variables, self.orders, {e: c * e[i] for e, c in self.coeffs.items() if e[i]})

    def d_inverse(self, var: str = "q") -> "TruncSeries":
        """Inverse of d_op with zero constant term in var; needs no var-constant part."""
        i = self._index(var)
        for e, c in self.coeffs.items():
            if e[i] == 0:
                raise NonNormalizedError("d_inverse", f"nonzero {var}-constant coefficient at {e}")
        return TruncSeries(self.variables, self.orders, {e: c * Fraction(1, e[i]) for e, c in self.coeffs.items()})

    # -- change of variables -----------------------------------------------
    def extend(self, variables: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        """Embed into a larger variable list (new variables get exponent 0)."""
        positions = [variables.index(v) for v in self.variables]
        coeffs = {}
        for e, c in self.coeffs.items():
            full = [0] * len(variables)
            for p, a in zip(positions, e):
                full[p] = a
            coeffs[tuple(full)] = c
        new_orders = list(orders)
        for p, o in zip(positions, self.orders):
            new_orders[p] = min(new_orders[p], o)
        return TruncSeries(variables, new_orders, coeffs)

    def restrict(self, var: str, value: int = 0) -> "TruncSeries":
        """Drop a variable by setting it to zero (value=0) or one."""
        i = self._index(var)
        variables = self.variables[:i] + self.variables[i + 1:]
        orders = self.orders[:i] + self.orders[i + 1:]
        coeffs: Dict[Exponent, object] = {}
        for e, c in self.coeffs.items():
            if value == 0 and e[i]:
                continue
            key = e[:i] + e[i + 1:]
            coeffs[key] = coeffs[key] + c if key in coeffs else c
        return TruncSeries(variables, orders, coeffs)

    def identify(self, sources: Sequence[str], target: str) -> "TruncSeries":
        """Substitute every variable in sources by target (q1 = q2 = q)."""
        idx = [self._index(v) for v in sources]
        keep = [k for k in range(len(self.variables)) if k not in idx]
        variables = (target,) + tuple(self.variables[k] for k in keep)
        order = min(self.orders[k] for k in idx)
        orders = (order,) + tuple(self.orders[k] for k in keep)
        coeffs: Dict[Exponent, object] = {}
        for e, c in self.coeffs.items():
            key = (sum(e[k] for k in idx),) + tuple(e[k] for k in keep)
            coeffs[key] = coeffs[key] + c if key in coeffs else c
        return TruncSeries(variables, orders, coeffs)

    def substitute_series(self, var: str, value: "TruncSeries") -> "TruncSeries":
        """
        Compose: replace univariate var by a series in var with zero constant
        term. Only univariate inputs are supported.
        """
        if self.variables != (var,) or value.variables != (var,):
            raise VariableMismatchError(self.variables, value.variables)
        if value.constant_term():
            raise NonNormalizedError("substitute_series", "inner series must have zero constant term")
        order = min(self.orders[0], value.orders[0])
        result = TruncSeries.zero((var,), (order,))
        power = TruncSeries.constant(1, (var,), (order,))
        for d in range(order + 1):
            c = self.coeffs.get((d,), 0)
            if c:
                result = result + power * c
            power = power * value
        return result

    def finite_part(self) -> "TruncSeries":
        """eps^0 part of every EpsLaurent coefficient, checking pole cancellation."""
        coeffs = {}
        for e, c in self.coeffs.items():
            if isinstance(c, EpsLaurent):
                poles = c.pole_order()
                if poles:
                    raise LimitError(e, poles)
                c = c.finite_part()
            coeffs[e] = c
        return TruncSeries(self.variables, self.orders, coeffs)

    def __repr__(self):
        if not self.coeffs:
            return f"0 + O({self.variables}^{self.orders})"
        parts = []
        for e in sorted(self.coeffs, key=lambda x: (sum(x), x)):
            mono = "*".join(f"{v}^{a}" for v, a in zip(self.variables, e) if a)
            parts.append(f"({self.coeffs[e]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) + f" + O({self.orders})"


def q_series(values: Iterable, order: Optional[int] = None) -> TruncSeries:
    """Shorthand for a univariate q-series."""
    return TruncSeries.from_list(values, "q", order)


def geometric(ratio, order: int, var: str = "q") -> TruncSeries:
    """1/(1 - ratio*var)"""
    return TruncSeries.from_function(lambda d: to_fraction(ratio) ** d, var, order)


# ---------------------------------------------------------------------------
# Exact fits
# ---------------------------------------------------------------------------

def _sympy_scalar(value):
    value = to_fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def fit_linear_combination(target: TruncSeries, basis: Dict[object, TruncSeries], margin: int = 1) -> Optional[Dict[object, Fraction]]:
    """
    Solve target = sum_k x_k * basis[k] exactly over Q from univariate
    coefficients.

    Args:
        target: univariate series with rational coefficients
        basis: named univariate series, same variable
        margin: required surplus of equations over unknowns (>= 1)

    Returns:
        Dict of nonzero solution coefficients, or None if the overdetermined
        system is inconsistent

    Raises:
        InsufficientOrderError: too few equations or a non-unique solution
    """
    keys = list(basis)
    order = min([target.orders[0]] + [basis[k].orders[0] for k in keys])
    equations = order + 1
    if equations < len(keys) + max(margin, 1):
        raise InsufficientOrderError(
            f"{equations} equations for {len(keys)} unknowns (margin {margin})"
        )
    rows = [[_sympy_scalar(basis[k].coefficient(d)) for k in keys] for d in range(equations)]
    rhs = [[_sympy_scalar(target.coefficient(d))] for d in range(equations)]
    logger.debug("fit: %d equations, %d unknowns", equations, len(keys))
    try:
        solution, params = sp.Matrix(rows).gauss_jordan_solve(sp.Matrix(rhs))
    except ValueError:
        return None
    if params.shape[0]:
        raise InsufficientOrderError(f"{params.shape[0]} free parameters remain")
    return {k: to_fraction(v) for k, v in zip(keys, solution) if v != 0}


def fit_laurent_in_generator(target: TruncSeries, gen: TruncSeries, window: Tuple[int, int], margin: int = 1) -> Optional[Dict[int, Fraction]]:
    """
    Find p_j with sum_{lo <= j <= hi} p_j * gen**j == target to truncation.

    Returns None when no exact solution exists.
    """
    lo, hi = window
    if hi < lo:
        raise ValueError(f"empty degree window {window}")
    inv = gen.inverse() if lo < 0 else None
    basis: Dict[int, TruncSeries] = {}
    for j in range(lo, hi + 1):
        basis[j] = inv ** (-j) if j < 0 else gen ** j
    return fit_linear_combination(target, basis, margin)


def laurent_value(coeffs: Dict[int, object], gen: TruncSeries) -> TruncSeries:
    """Evaluate sum_j coeffs[j] * gen**j."""
    total = TruncSeries.zero(gen.variables, gen.orders)
    for j, c in coeffs.items():
        total = total + (gen ** j) * c
    return total


def fit_in_polynomial_ring(target: TruncSeries, gen: TruncSeries, window: Tuple[int, int], other: TruncSeries, degree: int, margin: int = 1) -> Optional[Dict[Tuple[int, int], Fraction]]:
    """
    Find p_{jk} with sum p_{jk} * gen**j * other**k == target, j in window,
    0 <= k <= degree.

    Returns None when no exact solution exists.
    """
    lo, hi = window
    inv = gen.inverse() if lo < 0 else None
    powers = {j: (inv ** (-j) if j < 0 else gen ** j) for j in range(lo, hi + 1)}
    other_powers = [other ** k for k in range(degree + 1)]
    basis = {(j, k): powers[j] * other_powers[k] for j in powers for k in range(degree + 1)}
    return fit_linear_combination(target, basis, margin)


def polynomial_value(coeffs: Dict[Tuple[int, int], object], gen: TruncSeries, other: TruncSeries) -> TruncSeries:
    """Evaluate sum_{jk} coeffs[(j, k)] * gen**j * other**k."""
    total = TruncSeries.zero(gen.variables, gen.orders)
    for (j, k), c in coeffs.items():
        total = total + (gen ** j) * (other ** k) * c
    return total
