"""Exact integer and rational primitives the closed-form results rest on.

Every expectation in this package is carried as an exact rational;
floats appear only for quantities that are irrational by nature
(square roots, fractional powers). ``fractions.Fraction`` already
guarantees what we need from the rational carrier: values are stored
fully reduced with a positive denominator, and all arithmetic and
comparisons are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

ExactRational = Fraction


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k), with the convention that any
    out-of-range k (k < 0 or k > n) yields 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def factorial(n: int) -> int:
    """n! for n >= 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.factorial(n)


def triangular(m: int) -> int:
    """The m-th triangular number m(m+1)/2, with triangular(0) = 0."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return m * (m + 1) // 2


@dataclass(frozen=True)
class TriangularIndex:
    """A triangular-number index m together with its value m(m+1)/2."""

    m: int
    value: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.value != triangular(self.m):
            raise ValueError(f"{self.value} is not the {self.m}-th triangular number")


def triangular_bracket(x: int) -> TriangularIndex:
    """Locate x between consecutive triangular numbers.

    Returns the unique index m with triangular(m-1) < x <= triangular(m).
    Uses exact integer square roots throughout, so the bracket is correct
    for arbitrarily large x. Requires x >= 2 (menus have at least one
    item, so the quantity bracketed here is always at least 2).
    """
    if x < 2:
        raise ValueError("x must be at least 2")
    # m(m+1)/2 >= x  iff  m >= (sqrt(8x+1) - 1) / 2; isqrt may land one short.
    m = (math.isqrt(8 * x + 1) - 1) // 2
    if triangular(m) < x:
        m += 1
    return TriangularIndex(m, triangular(m))


def vandermonde_check(n: int, a: int, b: int) -> bool:
    """Verify the subset-splitting identity used by the rank expectations.

    Checks that sum over d of C(d, a) * C(n - d, b) equals C(n+1, a+b+1).
    Both sides count the (a+b+1)-element subsets of a set of n+1 elements;
    the left side splits the count by the position of the (a+1)-st
    smallest chosen element. Exposed as a self-test primitive.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not (0 <= a <= n and 0 <= b <= n):
        raise ValueError("a and b must lie in 0..n")
    lhs = sum(binomial(d, a) * binomial(n - d, b) for d in range(n + 1))
    return lhs == binomial(n + 1, a + b + 1)


def decimal_string(value: Fraction | int, digits: int) -> str:
    """Render an exact rational as a fixed-point decimal string.

    Rounds half-to-even at `digits` fractional places. The rounding is
    done in integer arithmetic on the exact value, never on a float.
    """
    if digits < 0:
        raise ValueError("digits must be non-negative")
    value = Fraction(value)
    scale = 10**digits
    units, rem = divmod(value.numerator * scale, value.denominator)
    if 2 * rem > value.denominator or (2 * rem == value.denominator and units % 2):
        units += 1
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), scale)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"
