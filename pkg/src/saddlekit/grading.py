"""Regularity grades in R_eta, the modulus eta, truncated powers and k_r."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import DomainError


@total_ordering
@dataclass(frozen=True)
class RegularityGrade:
    """An element ``base`` or ``base + eta`` of R_eta, stored exactly.

    ``v`` is the numerical value: ``base`` or ``base + 1`` when the eta flag
    is set. Ordering compares ``v`` only, so it is a total preorder.
    """

    base: Fraction
    eta_flag: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        if self.eta_flag and self.base.denominator != 1:
            raise DomainError("eta grades need an integer base")
        if not self.eta_flag and self.base.denominator == 1:
            raise DomainError("plain grades need a non-integer base")

    @property
    def v(self) -> Fraction:
        return self.base + 1 if self.eta_flag else self.base

    @property
    def in_r_eta(self) -> bool:
        """Whether the grade lies in the range base > -1 (or base >= -1 with eta)."""
        return self.base >= -1 if self.eta_flag else self.base > -1

    @property
    def derivative_order(self) -> int:
        """Integer part n so that the grade reads n + (fractional or eta part)."""
        return int(self.base) if self.eta_flag else math.floor(self.base)

    @property
    def holder_part(self) -> Fraction | None:
        """Fractional Holder exponent, or None for eta grades."""
        return None if self.eta_flag else self.base - math.floor(self.base)

    def __lt__(self, other: "RegularityGrade") -> bool:
        return self.v < other.v

    def __str__(self) -> str:
        return f"{self.base}+eta" if self.eta_flag else str(self.base)


def compare(g1: RegularityGrade, g2: RegularityGrade) -> int:
    return (g1.v > g2.v) - (g1.v < g2.v)


def eta_modulus(x: float) -> float:
    if x < 0:
        raise DomainError("eta is defined on [0, inf)")
    if x == 0:
        return 0.0
    if x <= math.exp(-1):
        return -x * math.log(x)
    return math.exp(-1)


def angle_power(s: float, a: float) -> float:
    """Truncated power <s>^a for s in (0, 1]."""
    if not 0 < s <= 1:
        raise DomainError(f"s must lie in (0, 1], got {s}")
    if a < 0:
        # expm1 keeps the a -> 0- limit 1 - log s
        return math.expm1(a * math.log(s)) / (-a) + 1
    if a == 0:
        return 1 - math.log(s)
    return 1.0


def order(m: int, k: int) -> Fraction:
    _check_mk(m, k)
    return Fraction(k - (m - 2), m)


def exponent(m: int, k: int) -> RegularityGrade:
    o = order(m, k)
    if o.denominator == 1:
        return RegularityGrade(Fraction(k - 2 * (m - 1), m), True)
    return RegularityGrade(o, False)


def hat_order(m: int, k: int) -> int:
    _check_mk(m, k)
    return k - (m - 2)


def hat_exponent(m: int, k: int) -> RegularityGrade:
    _check_mk(m, k)
    return RegularityGrade(Fraction(k - (m - 1)), True)


def k_r(m: int, r) -> int:
    if m < 2:
        raise DomainError("m must be >= 2")
    r = Fraction(r)
    if r < Fraction(-(m - 2), m):
        raise DomainError(f"r must be >= -(m-2)/m, got {r}")
    if r <= Fraction(-(m - 3), m):
        return math.ceil(m * r + (m - 1))
    return math.ceil(m * r + (m - 2))


def max_k_below(m: int, r) -> int:
    """max{k >= 0 : order(m, k) < r}, or -1 when no k qualifies."""
    r = Fraction(r)
    best = -1
    k = 0
    while order(m, k) < r:
        best = k
        k += 1
    return best


def _check_mk(m: int, k: int) -> None:
    if m < 2:
        raise DomainError("m must be >= 2")
    if k < 0:
        raise DomainError("k must be >= 0")
