"""
Intersection Numbers on Moduli of Curves
psi-class integrals by the string, dilaton and DVV recursions, and Hodge
integrals against lambda-class monomials in genus <= 2.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Dict, Iterable, Tuple

logger = logging.getLogger(__name__)

MAX_GENUS = 2

B_G = {0: Fraction(1), 1: Fraction(1, 24), 2: Fraction(7, 5760)}

# lambda monomials left after the genus <= 2 relations
BASIS_MONOMIALS = {0: [()], 1: [(0,), (1,)], 2: [(0, 0), (1, 0), (0, 1), (1, 1)]}


def double_factorial(k: int) -> int:
    """k!! with (-1)!! = 1"""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def multinomial(total: int, parts: Iterable[int]) -> int:
    parts = list(parts)
    if sum(parts) != total or any(p < 0 for p in parts):
        return 0
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


def is_stable(g: int, n: int) -> bool:
    return 2 * g - 2 + n > 0


# ---------------------------------------------------------------------------
# psi classes
# ---------------------------------------------------------------------------

def psi_intersection(g: int, exponents: Iterable[int]) -> Fraction:
    """
    Integral of prod psi_i^{a_i} over the moduli space of stable genus-g curves
    with len(exponents) markings; zero outside the stable range or off
    dimension.
    """
    return _psi(g, tuple(sorted(exponents, reverse=True)))


@lru_cache(maxsize=None)
def _psi(g: int, a: Tuple[int, ...]) -> Fraction:
    n = len(a)
    if g < 0 or not is_stable(g, n) or any(x < 0 for x in a):
        return Fraction(0)
    if sum(a) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and n == 3:
        return Fraction(1)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    if 0 in a:
        # string equation
        rest = list(a)
        rest.remove(0)
        total = Fraction(0)
        for j in range(len(rest)):
            if rest[j]:
                lowered = rest[:j] + [rest[j] - 1] + rest[j + 1:]
                total += psi_intersection(g, lowered)
        return total
    if 1 in a:
        # dilaton equation
        rest = list(a)
        rest.remove(1)
        return (2 * g - 2 + len(rest)) * psi_intersection(g, rest)
    return _dvv(g, a)


def _dvv(g: int, a: Tuple[int, ...]) -> Fraction:
    first, rest = a[0], list(a[1:])
    total = Fraction(0)
    for j, dj in enumerate(rest):
        others = rest[:j] + rest[j + 1:]
        coeff = Fraction(double_factorial(2 * first + 2 * dj - 1), double_factorial(2 * dj - 1))
        total += coeff * psi_intersection(g, [first + dj - 1] + others)
    half = Fraction(0)
    for r in range(first - 1):
        s = first - 2 - r
        weight = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
        half += weight * psi_intersection(g - 1, [r, s] + rest)
        for size in range(len(rest) + 1):
            for chosen in combinations(range(len(rest)), size):
                left = [rest[k] for k in chosen]
                right = [rest[k] for k in range(len(rest)) if k not in chosen]
                for g1 in range(g + 1):
                    half += weight * psi_intersection(g1, [r] + left) * psi_intersection(g - g1, [s] + right)
    total += half / 2
    return total / double_factorial(2 * first + 1)


# ---------------------------------------------------------------------------
# Hodge integrals
# ---------------------------------------------------------------------------

def reduce_lambda_monomial(g: int, lam: Tuple[int, ...]) -> Dict[Tuple[int, ...], Fraction]:
    """
    Rewrite lambda_1^{e_1} lambda_2^{e_2} ... in the basis used by the
    integral formulas, via lambda_1^2 = 2 lambda_2 and lambda_2^2 = 0 in
    genus 2 and lambda_1^2 = 0 in genus 1.

    Returns:
        Dict normalized exponent tuple (length g) -> coefficient
    """
    lam = tuple(lam) + (0,) * max(0, g - len(lam))
    if any(lam[g:]):
        return {}
    lam = lam[:g]
    if g == 0:
        return {(): Fraction(1)}
    if g == 1:
        return {lam: Fraction(1)} if lam[0] <= 1 else {}
    if g == 2:
        e1, e2 = lam
        coeff = Fraction(1)
        while e1 >= 2:
            e1 -= 2
            e2 += 1
            coeff *= 2
        if e2 >= 2:
            return {}
        return {(e1, e2): coeff}
    raise ValueError(f"Hodge integrals are implemented for genus <= {MAX_GENUS}")


def hodge_integral(g: int, lam: Tuple[int, ...], psi: Iterable[int]) -> Fraction:
    """
    Integral of a lambda monomial times prod psi_i^{a_i} over the moduli space
    of stable genus-g curves.

    Args:
        g: genus (<= 2)
        lam: exponents of (lambda_1, ..., lambda_g)
        psi: psi exponents, one per marking
    """
    psi = tuple(psi)
    total = Fraction(0)
    for mono, coeff in reduce_lambda_monomial(g, lam).items():
        total += coeff * _hodge_basis(g, mono, tuple(sorted(psi, reverse=True)))
    return total


@lru_cache(maxsize=None)
def _hodge_basis(g: int, mono: Tuple[int, ...], psi: Tuple[int, ...]) -> Fraction:
    n = len(psi)
    if not is_stable(g, n):
        return Fraction(0)
    degree = sum((k + 1) * e for k, e in enumerate(mono))
    if degree + sum(psi) != 3 * g - 3 + n:
        return Fraction(0)
    if not any(mono):
        return psi_intersection(g, psi)
    if g == 1 or mono == (0, 1):
        # lambda_g formula
        return multinomial(2 * g - 3 + n, psi) * B_G[g]
    if mono == (1, 1):
        # lambda_g lambda_{g-1} formula
        denom = 1
        for a in psi:
            denom *= double_factorial(2 * a - 1)
        return Fraction(factorial(n + 1), 5760 * denom)
    if mono == (1, 0):
        return _lambda1_genus2(psi)
    raise ValueError(f"no formula for lambda monomial {mono} in genus {g}")


def _lambda1_genus2(psi: Tuple[int, ...]) -> Fraction:
    """12 lambda_1 = kappa_1 - sum psi_i + delta on the genus-2 moduli space."""
    n = len(psi)
    kappa = psi_intersection(2, list(psi) + [2])
    psi_sum = Fraction(0)
    for i in range(n):
        raised = list(psi)
        raised[i] += 1
        psi_sum += psi_intersection(2, raised)
    delta = psi_intersection(1, list(psi) + [0, 0]) / 2
    markings = list(range(n))
    for h in range(3):
        for size in range(n + 1):
            for chosen in combinations(markings, size):
                if n and 0 not in chosen:
                    continue
                left = [psi[k] for k in chosen] + [0]
                right = [psi[k] for k in markings if k not in chosen] + [0]
                if not (is_stable(h, len(left)) and is_stable(2 - h, len(right))):
                    continue
                weight = Fraction(1, 2) if not n and h == 1 else Fraction(1)
                delta += weight * psi_intersection(h, left) * psi_intersection(2 - h, right)
    return (kappa - psi_sum + delta) / 12


def hodge_table_entries(max_genus: int = MAX_GENUS, max_markings: int = 6) -> Dict[Tuple[int, Tuple[int, ...], Tuple[int, ...]], Fraction]:
    """
    Every dimension-correct (g, lambda exponents, sorted psi exponents) entry
    with g <= max_genus and at most max_markings markings.
    """
    entries = {}
    for g in range(max_genus + 1):
        lambda_monos = BASIS_MONOMIALS[g]
        for n in range(max_markings + 1):
            if not is_stable(g, n):
                continue
            for mono in lambda_monos:
                degree = sum((k + 1) * e for k, e in enumerate(mono))
                budget = 3 * g - 3 + n - degree
                if budget < 0:
                    continue
                for psi in _partitions_into(budget, n):
                    entries[(g, mono, psi)] = hodge_integral(g, mono, psi)
    logger.debug("hodge table: %d entries", len(entries))
    return entries


def _partitions_into(total: int, parts: int):
    """Non-increasing tuples of `parts` non-negative integers summing to total."""
    def rec(remaining, slots, cap):
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        for first in range(min(remaining, cap), -1, -1):
            for tail in rec(remaining - first, slots - 1, first):
                yield (first,) + tail
    yield from rec(total, parts, total)
