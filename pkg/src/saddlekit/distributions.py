"""Local invariant distributions evaluated on jets."""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError, OrderTooSmallError
from .jets import ComplexJet, SaddleModel, jet_multiply
from .specialfn import RootsOfUnity, beta_like, binom_real


def _check(jet: ComplexJet, m: int, k: int) -> None:
    if m < 2:
        raise DomainError("m must be >= 2")
    if k < 0:
        raise DomainError("k must be >= 0")
    if jet.order < k:
        raise OrderTooSmallError(f"jet order {jet.order} < k = {k}")


def partial_coefficients(m: int, k: int, j: int) -> list[tuple[int, Fraction]]:
    """Exact weights (i, c) with partial^k_j = sum c * d[i][k-i]."""
    out = []
    n = 0
    while j + n * m <= k:
        num = math.comb(k, j + n * m) * binom_real(Fraction(m - 1 - j, m) - 1, n)
        den = binom_real(Fraction(k - j - (m - 1), m), n)
        out.append((j + n * m, num / den))
        n += 1
    return out


def _is_integral(z: complex) -> bool:
    return float(z.real).is_integer() and float(z.imag).is_integer()


def partial_dist_rational(jet: ComplexJet, m: int, k: int, j: int) -> tuple[Fraction, Fraction] | None:
    """(Re, Im) of partial^k_j as Fractions, or None if a used jet entry is not an integer."""
    _check(jet, m, k)
    if not 0 <= j <= min(k, m - 1):
        raise DomainError(f"j must lie in 0..min(k, m-1), got {j}")
    weights = partial_coefficients(m, k, j)
    vals = [jet[i, k - i] for i, _ in weights]
    if not all(_is_integral(v) for v in vals):
        return None
    re = sum((c * Fraction(int(v.real)) for (_, c), v in zip(weights, vals)), Fraction(0))
    im = sum((c * Fraction(int(v.imag)) for (_, c), v in zip(weights, vals)), Fraction(0))
    return re, im


def partial_dist(jet: ComplexJet, m: int, k: int, j: int) -> complex:
    exact = partial_dist_rational(jet, m, k, j)
    if exact is not None:
        return complex(float(exact[0]), float(exact[1]))
    weights = partial_coefficients(m, k, j)
    return complex(sum(float(c) * jet[i, k - i] for i, c in weights))


def beta_weight(m: int, k: int, j: int) -> complex:
    return beta_like(Fraction(m - 1 - j, m), Fraction(m - 1 - (k - j), m))


def relevant_indices(m: int, k: int) -> list[int]:
    """j <= min(k, m-2) with j != k-(m-1) mod m."""
    bad = (k - (m - 1)) % m
    return [j for j in range(min(k, m - 2) + 1) if j % m != bad]


def script_c(jet: ComplexJet, m: int, k: int, l: int) -> complex:
    _check(jet, m, k)
    if not 0 <= l < 2 * m:
        raise DomainError(f"l must lie in 0..{2 * m - 1}")
    roots = RootsOfUnity(m)
    total = 0j
    for j in relevant_indices(m, k):
        total += roots.theta0_pow(l * (2 * j - k)) * beta_weight(m, k, j) * partial_dist(jet, m, k, j)
    return total


def script_c_direct(jet: ComplexJet, m: int, k: int, l: int) -> complex:
    """Closed formula summing over every i; the Beta zero-rule drops the excluded ones."""
    _check(jet, m, k)
    if not 0 <= l < 2 * m:
        raise DomainError(f"l must lie in 0..{2 * m - 1}")
    roots = RootsOfUnity(m)
    total = 0j
    for i in range(k + 1):
        b = beta_weight(m, k, i)
        if b == 0:
            continue
        total += roots.theta0_pow(l * (2 * i - k)) * math.comb(k, i) * b * jet[i, k - i]
    return total


def script_c_all(jet: ComplexJet, m: int, k: int) -> list[complex]:
    return [script_c(jet, m, k, l) for l in range(2 * m)]


def recover_partial(cvals, m: int, k: int, j: int) -> complex:
    """(1/m) sum_{l<m} theta0^{l(k-2j)} C_l, which equals Beta(...) * partial^k_j."""
    if len(cvals) < m:
        raise DomainError(f"need at least m = {m} values")
    roots = RootsOfUnity(m)
    return sum(roots.theta0_pow(l * (k - 2 * j)) * cvals[l] for l in range(m)) / m


def weighted_sum(cvals, m: int, k: int, j: int) -> complex:
    """sum_{l<2m} theta0^{l(k-2j)} C_l."""
    if len(cvals) != 2 * m:
        raise DomainError(f"need 2m = {2 * m} values")
    roots = RootsOfUnity(m)
    return sum(roots.theta0_pow(l * (k - 2 * j)) * cvals[l] for l in range(2 * m))


def frak_d(f_jet: ComplexJet, saddle: SaddleModel, k: int, j: int) -> complex:
    return partial_dist(jet_multiply(f_jet, saddle.v_jet), saddle.m, k, j)


def frak_c(f_jet: ComplexJet, saddle: SaddleModel, k: int, l: int) -> complex:
    return script_c(jet_multiply(f_jet, saddle.v_jet), saddle.m, k, l)
