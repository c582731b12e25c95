"""Truncated Taylor jets in (w, conj w) at the origin.

Coefficients are raw derivatives d[i][j] = d^{i+j} f / dw^i dwbar^j (0, 0),
so the Taylor polynomial is sum d[i][j] w^i wbar^j / (i! j!).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, OrderTooSmallError

DEFAULT_ORDER = 12


def _triangle_mask(order: int) -> np.ndarray:
    idx = np.arange(order + 1)
    return (idx[:, None] + idx[None, :]) <= order


@dataclass(frozen=True, eq=False)
class ComplexJet:
    """Jet of order K: d[i][j] for i + j <= K (entries beyond are zero)."""

    order: int
    coeffs: np.ndarray
    real_valued: bool = False
    _terms: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.order < 0:
            raise DomainError("jet order must be non-negative")
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.order + 1, self.order + 1):
            raise DomainError(f"coefficient table must be {(self.order + 1,) * 2}, got {c.shape}")
        c[~_triangle_mask(self.order)] = 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.real_valued and not self.is_hermitian():
            raise DomainError("real_valued jet must satisfy d[j][i] = conj(d[i][j])")
        terms = []
        for i, j in zip(*np.nonzero(c)):
            terms.append((int(i), int(j), c[i, j] / (math.factorial(i) * math.factorial(j))))
        object.__setattr__(self, "_terms", tuple(terms))

    def __getitem__(self, ij) -> complex:
        i, j = ij
        if i < 0 or j < 0 or i + j > self.order:
            return 0j
        return complex(self.coeffs[i, j])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        c = self.coeffs
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        return bool(np.all(np.abs(c.T - np.conj(c)) <= tol * scale))

    @property
    def terms(self) -> tuple:
        """Nonzero Taylor terms (i, j, d[i][j]/(i! j!))."""
        return self._terms

    def __add__(self, other: "ComplexJet") -> "ComplexJet":
        k = min(self.order, other.order)
        return ComplexJet(k, self.coeffs[: k + 1, : k + 1] + other.coeffs[: k + 1, : k + 1])

    def __sub__(self, other: "ComplexJet") -> "ComplexJet":
        return self + other * (-1)

    def __mul__(self, c) -> "ComplexJet":
        if isinstance(c, ComplexJet):
            return jet_multiply(self, c)
        return ComplexJet(self.order, self.coeffs * complex(c),
                          real_valued=self.real_valued and complex(c).imag == 0)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "ComplexJet":
        if order > self.order:
            c = np.zeros((order + 1, order + 1), dtype=complex)
            c[: self.order + 1, : self.order + 1] = self.coeffs
            return ComplexJet(order, c, self.real_valued)
        return ComplexJet(order, self.coeffs[: order + 1, : order + 1], self.real_valued)

    def max_degree(self) -> int:
        return max((i + j for i, j, _ in self._terms), default=-1)


def zero_jet(order: int = DEFAULT_ORDER) -> ComplexJet:
    return ComplexJet(order, np.zeros((order + 1, order + 1)))


def constant_jet(c: complex = 1.0, order: int = DEFAULT_ORDER) -> ComplexJet:
    d = np.zeros((order + 1, order + 1), dtype=complex)
    d[0, 0] = c
    return ComplexJet(order, d, real_valued=complex(c).imag == 0)


def monomial_jet(i: int, j: int, order: int | None = None) -> ComplexJet:
    """Jet of w^i wbar^j, i.e. the single entry d[i][j] = i! j!."""
    if i < 0 or j < 0:
        raise DomainError("monomial exponents must be non-negative")
    order = max(DEFAULT_ORDER, i + j) if order is None else order
    if i + j > order:
        raise OrderTooSmallError(f"monomial degree {i + j} exceeds order {order}")
    d = np.zeros((order + 1, order + 1), dtype=complex)
    d[i, j] = math.factorial(i) * math.factorial(j)
    return ComplexJet(order, d)


def polynomial_jet(terms: dict, order: int = DEFAULT_ORDER) -> ComplexJet:
    """Jet of sum c * w^i wbar^j for {(i, j): c}."""
    d = np.zeros((order + 1, order + 1), dtype=complex)
    for (i, j), c in terms.items():
        if i + j > order:
            raise OrderTooSmallError(f"term degree {i + j} exceeds order {order}")
        d[i, j] += c * math.factorial(i) * math.factorial(j)
    return ComplexJet(order, d)


def jet_eval(jet: ComplexJet, w):
    """Taylor polynomial at w (scalar or array)."""
    w = np.asarray(w, dtype=complex)
    wb = np.conj(w)
    out = np.zeros_like(w)
    for i, j, c in jet.terms:
        out = out + c * w ** i * wb ** j
    return out[()] if out.ndim == 0 else out


def _binomials(n: int) -> np.ndarray:
    b = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for p in range(i + 1):
            b[i, p] = math.comb(i, p)
    return b


def jet_multiply(a: ComplexJet, b: ComplexJet) -> ComplexJet:
    """Leibniz product, truncated to the smaller order."""
    k = min(a.order, b.order)
    binom = _binomials(k)
    ac = a.coeffs[: k + 1, : k + 1]
    bc = b.coeffs[: k + 1, : k + 1]
    out = np.zeros((k + 1, k + 1), dtype=complex)
    for p, q in zip(*np.nonzero(ac)):
        if p + q > k:
            continue
        w = binom[p:, p][:, None] * binom[q:, q][None, :]
        out[p:, q:] += ac[p, q] * w * bc[: k + 1 - p, : k + 1 - q]
    return ComplexJet(k, out, real_valued=a.real_valued and b.real_valued)


def jet_scale(jet: ComplexJet, c: float) -> ComplexJet:
    """Jet of w -> f(c w) for real c > 0: d[i][j] * c^(i+j)."""
    if not c > 0:
        raise DomainError("scale factor must be positive")
    idx = np.arange(jet.order + 1)
    return ComplexJet(jet.order, jet.coeffs * float(c) ** (idx[:, None] + idx[None, :]),
                      jet.real_valued)


def jet_precompose(jet: ComplexJet, c: complex) -> ComplexJet:
    """Jet of w -> f(c w) for complex c: d[i][j] * c^i conj(c)^j."""
    idx = np.arange(jet.order + 1)
    c = complex(c)
    fac = (c ** idx)[:, None] * (np.conj(c) ** idx)[None, :]
    return ComplexJet(jet.order, jet.coeffs * fac)


def jet_derivative(jet: ComplexJet, n1: int, n2: int) -> ComplexJet:
    """Jet of d^{n1+n2} f / dw^n1 dwbar^n2."""
    n = n1 + n2
    if n > jet.order:
        return zero_jet(0)
    k = jet.order - n
    return ComplexJet(k, jet.coeffs[n1: n1 + k + 1, n2: n2 + k + 1])


def homogeneous_part(jet: ComplexJet, j: int) -> ComplexJet:
    if not 0 <= j <= jet.order:
        raise DomainError(f"degree {j} outside 0..{jet.order}")
    idx = np.arange(jet.order + 1)
    keep = (idx[:, None] + idx[None, :]) == j
    return ComplexJet(jet.order, np.where(keep, jet.coeffs, 0), jet.real_valued)


def jet_inverse(jet: ComplexJet) -> ComplexJet:
    """Multiplicative inverse jet, solved degree by degree from Leibniz."""
    g0 = jet[0, 0]
    if g0 == 0:
        raise DomainError("jet with zero constant term has no inverse")
    k = jet.order
    binom = _binomials(k)
    g = jet.coeffs
    h = np.zeros((k + 1, k + 1), dtype=complex)
    for deg in range(k + 1):
        for i in range(deg + 1):
            j = deg - i
            acc = 0j
            for p in range(i + 1):
                for q in range(j + 1):
                    if p == 0 and q == 0:
                        continue
                    acc += binom[i, p] * binom[j, q] * g[p, q] * h[i - p, j - q]
            h[i, j] = ((1.0 if deg == 0 else 0.0) - acc) / g0
    return ComplexJet(k, h, jet.real_valued)


def real_part_jet(order: int = DEFAULT_ORDER) -> ComplexJet:
    """Jet of Re w = (w + wbar)/2."""
    return polynomial_jet({(1, 0): 0.5, (0, 1): 0.5}, order)


def random_jet(rng: np.random.Generator, order: int = DEFAULT_ORDER, scale: float = 1.0) -> ComplexJet:
    """Random complex jet with O(1) Taylor coefficients."""
    idx = np.arange(order + 1)
    fact = np.array([math.factorial(i) for i in idx], dtype=float)
    taylor = rng.normal(size=(order + 1, order + 1)) + 1j * rng.normal(size=(order + 1, order + 1))
    return ComplexJet(order, scale * taylor * fact[:, None] * fact[None, :])


def write_jet(jet: ComplexJet, path) -> None:
    lines = [f"order {jet.order}"]
    for i, j in zip(*np.nonzero(jet.coeffs)):
        c = jet.coeffs[i, j]
        lines.append(f"{i} {j} {float(c.real)!r} {float(c.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_jet(text: str) -> ComplexJet:
    order = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "order":
            if len(parts) != 2:
                raise DomainError(f"line {lineno}: expected 'order K'")
            order = int(parts[1])
            continue
        if len(parts) not in (3, 4):
            raise DomainError(f"line {lineno}: expected 'i j re [im]'")
        i, j = int(parts[0]), int(parts[1])
        im = float(parts[3]) if len(parts) == 4 else 0.0
        entries.append((i, j, complex(float(parts[2]), im)))
    if order is None:
        raise DomainError("missing 'order K' header")
    d = np.zeros((order + 1, order + 1), dtype=complex)
    for i, j, c in entries:
        if i < 0 or j < 0 or i + j > order:
            raise DomainError(f"entry ({i}, {j}) outside order {order}")
        d[i, j] = c
    return ComplexJet(order, d)


def read_jet(path) -> ComplexJet:
    return parse_jet(Path(path).read_text())


@dataclass(frozen=True, eq=False)
class SaddleModel:
    """Perfect saddle of multiplicity m with density jet V on a chart of radius epsilon."""

    m: int
    v_jet: ComplexJet
    epsilon: float = 1.0

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("multiplicity m must be >= 2")
        v00 = self.v_jet[0, 0]
        if abs(v00.imag) > 1e-14 or v00.real <= 0:
            raise DomainError("density must have real positive value at the saddle")
        if not self.v_jet.is_hermitian():
            raise DomainError("density jet must be real valued")
        if not 0 < self.epsilon <= 1:
            raise DomainError("epsilon must lie in (0, 1]")
