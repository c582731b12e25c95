"""Root branches, the sector integrals G^l_{a1,a2}, F/G-type functions and phi_{f,l}.

Integrals run over v in [-1, u] at height s in the z = w^m chart. For small
|s| the integrand has a peak of width O(|s|) at v = 0; the default policy
substitutes v = |s| sinh t which makes it smooth and slowly varying in t.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Union

import numpy as np

from .errors import DivergenceError, DomainError, SlitError, VertexError
from .jets import ComplexJet, jet_derivative, jet_eval
from .quadrature import QuadResult, QuadSpec, integrate

TWO_PI = 2 * math.pi

FunctionLike = Union[ComplexJet, Callable, None]
# linear combination of F-type indices (n1, n2, a1, a2) -> coefficient
Combo = Mapping[tuple, complex]


def arg0(v, s):
    """Arg of v + i s in [0, 2 pi)."""
    t = np.arctan2(s, v)
    return np.where(t < 0, t + TWO_PI, t)


def root_branch(m: int, l: int, z: complex) -> complex:
    """G_l(z) = theta^l G_0(z) with G_0(r e^{it}) = r^{1/m} e^{it/m}, t in [0, 2pi)."""
    if not 0 <= l < m:
        raise DomainError(f"branch index must lie in 0..{m - 1}")
    z = complex(z)
    if z == 0:
        raise VertexError("root branch is undefined at the vertex")
    t = float(arg0(z.real, z.imag))
    return abs(z) ** (1.0 / m) * complex(math.cos((t + TWO_PI * l) / m), math.sin((t + TWO_PI * l) / m))


def angular_sector(m: int, w: complex) -> int:
    """Index L in 0..2m-1 with Arg w in [pi L/m, pi (L+1)/m)."""
    return int(float(arg0(w.real, w.imag)) * m / math.pi) % (2 * m)


def in_angular_sector(m: int, L: int, w: complex, closed: bool = False) -> bool:
    if w == 0:
        return closed
    t = float(arg0(w.real, w.imag))
    lo, hi = math.pi * L / m, math.pi * (L + 1) / m
    if closed:
        tol = 1e-14
        return lo - tol <= t <= hi + tol or (L == 2 * m - 1 and t <= tol)
    return lo < t < hi


def in_square_preimage(m: int, w: complex) -> bool:
    """w in D: |Re w^m| <= 1 and |Im w^m| <= 1."""
    z = complex(w) ** m
    tol = 1e-12
    return abs(z.real) <= 1 + tol and abs(z.imag) <= 1 + tol


def in_cone(u: float, s: float, r: float) -> bool:
    """(u, s) in S(r) = {(u, s) != (0, 0) : u <= r |s|}."""
    return (u, s) != (0, 0) and u <= r * abs(s)


@dataclass(frozen=True)
class _Pts:
    """Sample points of the chart with |z| computed stably."""

    v: np.ndarray
    s: float
    r: np.ndarray  # |v + i s|


def _eval_f(f: FunctionLike, n1: int, n2: int, w: np.ndarray) -> np.ndarray:
    if f is None:
        return np.ones_like(w) if n1 == n2 == 0 else np.zeros_like(w)
    if isinstance(f, ComplexJet):
        return jet_eval(jet_derivative(f, n1, n2), w) if n1 or n2 else jet_eval(f, w)
    try:
        return np.asarray(f(w, n1, n2), dtype=complex)
    except TypeError:
        if n1 or n2:
            raise
        return np.asarray(f(w), dtype=complex)


def _combo_values(f: FunctionLike, m: int, l: int, combo: Combo, p: _Pts) -> np.ndarray:
    t = arg0(p.v, p.s)
    phase = (t + TWO_PI * l) / m
    lr = np.log(p.r)
    g = np.exp(lr / m + 1j * phase)
    out = np.zeros(np.shape(p.v), dtype=complex)
    cache = {}
    for (n1, n2, a1, a2), c in combo.items():
        if c == 0:
            continue
        key = (n1, n2)
        if key not in cache:
            cache[key] = _eval_f(f, n1, n2, g)
        out += c * cache[key] * np.exp(-(a1 + a2) / m * lr + 1j * (a2 - a1) * phase)
    return out


def ftype_combo_eval(f: FunctionLike, m: int, l: int, combo: Combo, u, s) -> np.ndarray:
    """Pointwise value of a combination of F-type functions at z = u + i s."""
    u = np.asarray(u, dtype=float)
    r = np.hypot(u, s)
    if np.any(r == 0):
        raise VertexError("F-type functions are undefined at the vertex")
    return _combo_values(f, m, l, combo, _Pts(u, s, r))


def ftype_eval(f: FunctionLike, m: int, l: int, n1: int, n2: int, a1: int, a2: int, u, s):
    """F_{n1,n2,a1,a2}(u, s) = D^{n1,n2} f(G) G^{-a1} conj(G)^{-a2}."""
    return ftype_combo_eval(f, m, l, {(n1, n2, a1, a2): 1.0}, u, s)


def ftype_degree(m: int, n1: int, n2: int, a1: int, a2: int) -> float:
    return (n1 + n2 + a1 + a2) / m


def gtype_degree(m: int, n1: int, n2: int, a1: int, a2: int) -> float:
    return ftype_degree(m, n1, n2, a1, a2) - 1


def _singular_exponent(m: int, combo: Combo) -> float:
    return max(((a1 + a2) / m for (_, _, a1, a2), c in combo.items() if c != 0), default=0.0)


def gtype_combo(f: FunctionLike, m: int, l: int, combo: Combo, u: float, s: float,
                q: QuadSpec = QuadSpec()) -> QuadResult:
    """Integral over v in [-1, u] of a combination of F-type functions at height s."""
    if not 0 <= l < m:
        raise DomainError(f"branch index must lie in 0..{m - 1}")
    if not (-1 <= u <= 1 and -1 <= s <= 1):
        raise DomainError("(u, s) must lie in the square [-1, 1]^2")
    if u == -1:
        return QuadResult(0j, 0.0, 0)
    if s == 0:
        return _integrate_on_axis(f, m, l, combo, u, q)
    a = abs(s)

    def plain(v):
        return _combo_values(f, m, l, combo, _Pts(v, s, np.hypot(v, s)))

    def sinh_t(t):
        v = a * np.sinh(t)
        r = a * np.cosh(t)
        return _combo_values(f, m, l, combo, _Pts(v, s, r)) * r

    if a >= q.sinh_threshold:
        return integrate(plain, -1.0, u, q, breakpoints=(0.0,))
    if q.sing_policy == "sinh-substitution":
        return integrate(sinh_t, math.asinh(-1.0 / a), math.asinh(u / a), q)
    # graded cells at -|s| 8^k, sinh substitution only on the innermost cell
    outer = [-a * 8.0 ** k for k in range(1, 40) if a * 8.0 ** k < 1]
    right = [a * 8.0 ** k for k in range(1, 40) if a * 8.0 ** k < u]
    total = QuadResult(0j, 0.0, 0)
    lo_inner, hi_inner = -a, min(a, u)
    if u > -a:
        inner = integrate(sinh_t, math.asinh(lo_inner / a), math.asinh(hi_inner / a), q)
        left = integrate(plain, -1.0, -a, q, breakpoints=outer)
        parts = [inner, left]
        if u > a:
            parts.append(integrate(plain, a, u, q, breakpoints=right))
    else:
        parts = [integrate(plain, -1.0, u, q, breakpoints=outer)]
    for p in parts:
        total = QuadResult(total.value + p.value, total.error + p.error, total.n_panels + p.n_panels)
    return total


def _integrate_on_axis(f, m, l, combo, u, q):
    p = _singular_exponent(m, combo)
    if u >= 0:
        if p >= 1:
            raise DivergenceError("integrand is not integrable across the vertex at s = 0")
        raise SlitError("s = 0 with u >= 0 runs along the slit; pass s != 0 or u < 0")

    def plain(v):
        return _combo_values(f, m, l, combo, _Pts(v, 0.0, np.abs(v)))

    return integrate(plain, -1.0, u, q)


def gtype_eval(f: FunctionLike, m: int, l: int, n1: int, n2: int, a1: int, a2: int,
               u: float, s: float, q: QuadSpec = QuadSpec()) -> complex:
    return gtype_combo(f, m, l, {(n1, n2, a1, a2): 1.0}, u, s, q).value


def g_fun(m: int, l: int, a1: int, a2: int, u: float, s: float, q: QuadSpec = QuadSpec()) -> complex:
    """G^l_{a1,a2}(u, s) = int_{-1}^u G_l^{-a1} conj(G_l)^{-a2} dv."""
    return gtype_combo(None, m, l, {(0, 0, a1, a2): 1.0}, u, s, q).value


def g_fun_result(m, l, a1, a2, u, s, q: QuadSpec = QuadSpec()) -> QuadResult:
    return gtype_combo(None, m, l, {(0, 0, a1, a2): 1.0}, u, s, q)


def _script_combo(m: int) -> dict:
    return {(0, 0, m - 1, m - 1): 1.0}


def script_f(f: FunctionLike, m: int, l: int, u: float, s: float, q: QuadSpec = QuadSpec()) -> complex:
    """int_{-1}^u f(G_l(v, s)) / (v^2 + s^2)^{(m-1)/m} dv."""
    return gtype_combo(f, m, l, _script_combo(m), u, s, q).value


def phi(f: FunctionLike, m: int, l: int, s: float, q: QuadSpec = QuadSpec()) -> complex:
    if s == 0:
        raise DivergenceError("phi is defined only for s != 0")
    return script_f(f, m, l, 1.0, s, q)


def phi_result(f: FunctionLike, m: int, l: int, s: float, q: QuadSpec = QuadSpec()) -> QuadResult:
    if s == 0:
        raise DivergenceError("phi is defined only for s != 0")
    return gtype_combo(f, m, l, _script_combo(m), 1.0, s, q)


def big_f(f: FunctionLike, m: int, w: complex, q: QuadSpec = QuadSpec()) -> complex:
    """F_f(w) = script_f at (Re w^m, Im w^m) on the branch containing w."""
    w = complex(w)
    if w == 0:
        raise VertexError("F_f is undefined at the vertex")
    t = float(arg0(w.real, w.imag))
    l = int(t * m / TWO_PI) % m
    z = w ** m
    if abs(t * m / TWO_PI - round(t * m / TWO_PI)) < 1e-13:
        raise SlitError("w lies on a preimage of the slit")
    if not in_square_preimage(m, w):
        raise DomainError("w lies outside the domain D")
    return script_f(f, m, l, min(max(z.real, -1.0), 1.0), min(max(z.imag, -1.0), 1.0), q)


# derivative recursions for F-type combinations

def d_dz_combo(combo: Combo, m: int) -> dict:
    """d/dz of a combination of F-type functions."""
    out: dict = {}
    for (n1, n2, a1, a2), c in combo.items():
        _acc(out, (n1 + 1, n2, a1 + m - 1, a2), c / m)
        _acc(out, (n1, n2, a1 + m, a2), -c * a1 / m)
    return out


def d_dzbar_combo(combo: Combo, m: int) -> dict:
    out: dict = {}
    for (n1, n2, a1, a2), c in combo.items():
        _acc(out, (n1, n2 + 1, a1, a2 + m - 1), c / m)
        _acc(out, (n1, n2, a1, a2 + m), -c * a2 / m)
    return out


def d_ds_combo(combo: Combo, m: int) -> dict:
    """d/ds = i (d/dz - d/dzbar) applied to an F-type combination."""
    out: dict = {}
    for key, c in d_dz_combo(combo, m).items():
        _acc(out, key, 1j * c)
    for key, c in d_dzbar_combo(combo, m).items():
        _acc(out, key, -1j * c)
    return {k: c for k, c in out.items() if c != 0}


def _acc(d: dict, key, c) -> None:
    d[key] = d.get(key, 0) + c


def script_f_ds(f: FunctionLike, m: int, l: int, u: float, s: float, order: int,
                q: QuadSpec = QuadSpec()) -> complex:
    """d^order/ds^order of script_f by differentiating under the integral sign."""
    combo: dict = _script_combo(m)
    for _ in range(order):
        combo = d_ds_combo(combo, m)
    return gtype_combo(f, m, l, combo, u, s, q).value


def dump_phi_csv(f: FunctionLike, m: int, l: int, s_values, path, q: QuadSpec = QuadSpec(),
                 header_comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        w.writerow(["s", "re(phi)", "im(phi)", "est_err"])
        for s in s_values:
            res = phi_result(f, m, l, s, q)
            w.writerow([repr(float(s)), repr(float(res.value.real)), repr(float(res.value.imag)), repr(float(res.error))])
