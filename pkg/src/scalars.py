"""
Exact Scalar Tower
Rationals, cyclotomic fields Q(zeta_N) and truncated Laurent series in a
limit regulator eps.
"""
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple, Union

import sympy as sp

Rational = Union[int, Fraction]

_X = sp.Symbol("x")


def to_fraction(value) -> Fraction:
    """Coerce int, Fraction or sympy Rational to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, Cyclotomic) and value.is_rational():
        return value.coeffs[0]
    raise TypeError(f"Cannot convert {value!r} to a rational")


@lru_cache(maxsize=None)
def cyclotomic_modulus(order: int) -> Tuple[Fraction, ...]:
    """
    Coefficients of the N-th cyclotomic polynomial, constant term first.

    Args:
        order: N >= 1

    Returns:
        Tuple (c_0, ..., c_{phi(N)}), monic
    """
    poly = sp.Poly(sp.cyclotomic_poly(order, _X), _X)
    return tuple(to_fraction(c) for c in reversed(poly.all_coeffs()))


class Cyclotomic:
    """Element of Q(zeta_N) stored as coefficients modulo Phi_N."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable):
        modulus = cyclotomic_modulus(order)
        degree = len(modulus) - 1
        work = [to_fraction(c) for c in coeffs]
        # Reduce modulo the monic Phi_N from the top down
        for top in range(len(work) - 1, degree - 1, -1):
            lead = work[top]
            if lead:
                shift = top - degree
                for k, m in enumerate(modulus):
                    work[shift + k] -= lead * m
        work = work[:degree] + [Fraction(0)] * (degree - len(work))
        self.order = order
        self.coeffs = tuple(work)

    # -- constructors ------------------------------------------------------
    @classmethod
    def root(cls, order: int, power: int = 1) -> "Cyclotomic":
        """zeta_N ** power"""
        power %= order
        return cls(order, [0] * power + [1])

    @classmethod
    def rational(cls, order: int, value: Rational) -> "Cyclotomic":
        return cls(order, [value])

    # -- predicates --------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __bool__(self) -> bool:
        return any(self.coeffs)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise ValueError(
                    f"Cyclotomic order mismatch: {self.order} vs {other.order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Cyclotomic(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Cyclotomic(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        product = [Fraction(0)] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return Cyclotomic(self.order, product)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if not self:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        if self.is_rational():
            return Cyclotomic(self.order, [1 / self.coeffs[0]])
        poly = sp.Poly([sp.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], _X, domain="QQ")
        modulus = sp.Poly([sp.Rational(c.numerator, c.denominator) for c in reversed(cyclotomic_modulus(self.order))], _X, domain="QQ")
        inv = poly.invert(modulus)
        return Cyclotomic(self.order, reversed(inv.all_coeffs()))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [a / other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Cyclotomic(self.order, [1])
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, Cyclotomic):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*z{self.order}^{k}")
        return " + ".join(terms) if terms else "0"


class EpsLaurent:
    """
    Truncated Laurent series in the regulator eps.

    Terms with exponent >= prec are unknown; prec is math.inf for exact values.
    """

    __slots__ = ("terms", "prec")

    def __init__(self, terms: Dict[int, object], prec=math.inf):
        self.terms = {e: c for e, c in terms.items() if c and e < prec}
        self.prec = prec

    @classmethod
    def eps(cls, prec: int) -> "EpsLaurent":
        return cls({1: 1}, prec)

    @classmethod
    def exact(cls, value) -> "EpsLaurent":
        return cls({0: value})

    def valuation(self):
        return min(self.terms) if self.terms else self.prec

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> "EpsLaurent":
        if isinstance(other, EpsLaurent):
            return other
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return EpsLaurent({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return EpsLaurent(terms, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return EpsLaurent({e: -c for e, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec + other.valuation(), other.prec + self.valuation())
        terms: Dict[int, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e < prec:
                    terms[e] = terms.get(e, 0) + c1 * c2
        return EpsLaurent(terms, prec)

    __rmul__ = __mul__

    def inverse(self) -> "EpsLaurent":
        if not self.terms:
            raise ZeroDivisionError("inverse of an eps-series with no known nonzero term")
        v = self.valuation()
        lead = self.terms[v]
        lead_inv = Fraction(1) / lead
        if self.prec == math.inf and len(self.terms) == 1:
            return EpsLaurent({-v: lead_inv})
        rel_prec = self.prec - v
        if rel_prec == math.inf:
            raise ValueError("exact multi-term eps value needs a precision before inversion")
        # self = lead * eps^v * (1 + n), n has positive exponents
        n = EpsLaurent({e - v: c * lead_inv for e, c in self.terms.items() if e != v}, rel_prec)
        total = EpsLaurent({0: 1}, rel_prec)
        power = EpsLaurent({0: 1}, rel_prec)
        for _ in range(int(rel_prec)):
            power = power * (-n)
            if not power.terms:
                break
            total = total + power
        return EpsLaurent({e - v: c * lead_inv for e, c in total.terms.items()}, self.prec - 2 * v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return EpsLaurent({e: c / other for e, c in self.terms.items()}, self.prec)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = EpsLaurent({0: 1})
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        mine = {e: c for e, c in self.terms.items() if e < prec}
        theirs = {e: c for e, c in other.terms.items() if e < prec}
        return mine == theirs

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    def pole_order(self) -> int:
        negative = [e for e in self.terms if e < 0]
        return -min(negative) if negative else 0

    def finite_part(self):
        """eps^0 coefficient; callers check pole_order() first."""
        if self.prec <= 0:
            raise ValueError(f"eps precision {self.prec} too low for a finite part")
        return self.terms.get(0, 0)

    def __repr__(self):
        body = " + ".join(f"({c})*eps^{e}" for e, c in sorted(self.terms.items()))
        return f"{body or '0'} + O(eps^{self.prec})"


def scalar_to_str(value) -> str:
    """Exact string form: "p/q" for rationals, coefficient list for Q(zeta_N)."""
    if isinstance(value, Cyclotomic):
        if value.is_rational():
            value = value.coeffs[0]
        else:
            return "[" + ", ".join(scalar_to_str(c) for c in value.coeffs) + f"]_zeta{value.order}"
    if isinstance(value, EpsLaurent):
        return repr(value)
    value = to_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def is_rational_scalar(value) -> bool:
    if isinstance(value, (int, Fraction)):
        return True
    if isinstance(value, Cyclotomic):
        return value.is_rational()
    return False
