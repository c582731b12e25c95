"""Extended Gamma, real binomials, roots of unity and the Beta-like function.

Arguments may be floats, ints or :class:`fractions.Fraction`. Fractions keep
integer detection exact, which matters because the Beta-like function
branches on whether its arguments are non-positive integers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import DomainError

Real = Union[int, float, Fraction]

INT_TOL = 1e-9


def as_integer(x: Real) -> int | None:
    """Return ``x`` as an int if it is (numerically) an integer, else None."""
    if isinstance(x, Rational):
        q = Fraction(x)
        return int(q) if q.denominator == 1 else None
    r = round(x)
    if abs(x - r) <= INT_TOL:
        return int(r)
    return None


def is_nonpos_int(x: Real) -> bool:
    n = as_integer(x)
    return n is not None and n <= 0


def gamma_ext(x: Real) -> float:
    """Gamma with the convention Gamma(-n) = 1/((-1)^n n!) at non-positive integers."""
    n = as_integer(x)
    if n is not None and n <= 0:
        k = -n
        return (-1.0) ** k / math.factorial(k)
    if n is not None:
        return float(math.factorial(n - 1))
    return math.gamma(float(x))


def binom_real(x: Real, n: int):
    """Generalized binomial x(x-1)...(x-n+1)/n!.

    At x == 0 and n >= 1 the convention (-1)^(n-1)/n is used. Exact when
    ``x`` is rational.
    """
    if n < 0:
        raise DomainError(f"binomial order must be non-negative, got {n}")
    if n == 0:
        return Fraction(1) if isinstance(x, Rational) else 1.0
    exact = isinstance(x, Rational)
    if (Fraction(x) == 0) if exact else (x == 0):
        val = Fraction((-1) ** (n - 1), n)
        return val if exact else float(val)
    if exact:
        acc = Fraction(1)
        xq = Fraction(x)
        for i in range(n):
            acc *= xq - i
        return acc / math.factorial(n)
    acc = 1.0
    for i in range(n):
        acc *= (x - i) / (i + 1)
    return acc


@dataclass(frozen=True)
class RootsOfUnity:
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("m must be >= 2")

    @property
    def theta(self) -> complex:
        return cmath.exp(2j * math.pi / self.m)

    @property
    def theta0(self) -> complex:
        return cmath.exp(1j * math.pi / self.m)

    def theta0_pow(self, p: int) -> complex:
        """theta0**p with the exponent reduced mod 2m before exponentiating."""
        return unit_phase(Fraction(p % (2 * self.m), self.m))


def unit_phase(t: Real) -> complex:
    """exp(i*pi*t), exact at multiples of 1/2 for rational t."""
    if isinstance(t, Rational):
        t = Fraction(t) % 2
        exact = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j,
                 Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
        if t in exact:
            return exact[t]
        return cmath.exp(1j * math.pi * float(t))
    return cmath.exp(1j * math.pi * t)


def beta_like(x: Real, y: Real) -> complex:
    """The Beta-like constant pi e^{i pi (y-x)/2} 2^{2-x-y} Gamma(x+y-1)/(Gamma(x)Gamma(y)).

    Vanishes when x or y is a non-positive integer. Gamma(x+y-1) uses the
    extended convention, so pairs of non-integers with x+y an integer <= 1
    are covered too.
    """
    if is_nonpos_int(x) or is_nonpos_int(y):
        return 0j
    try:
        gx = gamma_ext(x)
        gy = gamma_ext(y)
        gxy = gamma_ext(x + y - 1)
    except (OverflowError, ValueError) as exc:
        raise DomainError(f"Gamma out of range for ({x}, {y})") from exc
    if not all(map(math.isfinite, (gx, gy, gxy))):
        raise DomainError(f"Gamma out of range for ({x}, {y})")
    phase = unit_phase((y - x) / 2 if isinstance(x - y, Rational) else (float(y) - float(x)) / 2)
    mag = math.pi * 2.0 ** (2 - float(x) - float(y)) * gxy / (gx * gy)
    return phase * mag


def beta_branch(x: Real, y: Real) -> str:
    """Which of the three mutually exclusive branches (x, y) falls in."""
    if is_nonpos_int(x) or is_nonpos_int(y):
        return "zero"
    s = as_integer(x + y)
    if s is not None and s <= 1 and as_integer(x) is None and as_integer(y) is None:
        return "extended"
    return "regular"
