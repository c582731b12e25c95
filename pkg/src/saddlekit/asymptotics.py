"""Numerical limits, decompositions and extension checks for phi_{f,l} and G^l.

Derivatives of phi are taken by Chebyshev interpolation on a window around s
that stays on one side of 0; limits are extrapolated from a dyadic grid with
known correction exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

from . import grading
from .distributions import partial_dist, relevant_indices, script_c
from .errors import (HypothesisViolatedError, IllConditionedFitError,
                     InsufficientPointsError)
from .jets import ComplexJet
from .quadrature import QuadSpec
from .sector_integrals import big_f, g_fun, phi, phi_result, root_branch, script_f_ds
from .specialfn import RootsOfUnity, beta_like, binom_real

REL_FLOOR = 1e-14
DEFAULT_GRID = tuple(2.0 ** -j for j in range(6, 19))


@dataclass
class LimitReport:
    estimate: complex
    expected: complex
    rel_err: float
    grid: list
    fit_exponents: list
    tolerance: float = float("nan")
    label: str = ""
    values: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rel_err <= self.tolerance)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "estimate": _cjson(self.estimate),
            "expected": _cjson(self.expected),
            "rel_err": self.rel_err,
            "grid": list(map(float, self.grid)),
            "pass": self.passed,
        }


def _cjson(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def make_report(estimate, expected, grid, exps, tol, label="", values=()) -> LimitReport:
    rel = abs(estimate - expected) / max(abs(expected), REL_FLOOR)
    return LimitReport(complex(estimate), complex(expected), float(rel), list(grid),
                       [float(e) for e in exps], tol, label, list(values))


# extrapolation

def _check_grid(s: np.ndarray) -> None:
    if len(s) < 4:
        raise InsufficientPointsError("need at least 4 grid points")
    a = np.abs(s)
    if np.any(np.diff(a) >= 0):
        raise InsufficientPointsError("grid must be strictly decreasing in |s|")
    ratios = a[1:] / a[:-1]
    if np.ptp(ratios) > 1e-9 * ratios.mean():
        raise InsufficientPointsError("grid must be geometric")


def estimate_correction_exponent(s, y) -> float | None:
    """Leading correction exponent q from y = L + c s^q on the three finest points."""
    a = np.abs(np.asarray(s, dtype=float))
    y = np.asarray(y, dtype=complex)
    d1, d2 = y[-3] - y[-2], y[-2] - y[-1]
    if abs(d2) == 0 or abs(d1) == 0:
        return None
    ratio = abs(d1 / d2)
    rho = a[-1] / a[-2]
    if ratio <= 1:
        return None
    return math.log(ratio) / math.log(1 / rho)


def power_limit(samples: Sequence[tuple], p: float, corrections: Sequence[float] | None = None,
                nfit: int | None = None) -> complex:
    """Extrapolate lim s^p g(s) from (s, g) samples on a decreasing geometric grid.

    The fit is y = L + sum c_q s^q over the finest points with ``corrections``
    as the exponents q. Without explicit exponents the leading one is estimated
    from the finest three points. If nothing sensible can be fitted the finest
    value is returned.
    """
    s = np.array([float(a) for a, _ in samples])
    _check_grid(s)
    a = np.abs(s)
    y = np.array([complex(g) for _, g in samples]) * a ** p
    if corrections is None:
        q = estimate_correction_exponent(s, y)
        if q is None or not 0 < q < 8:
            return complex(y[-1])
        corrections = (q,)
    corrections = sorted({float(q) for q in corrections if q > 0})
    if not corrections:
        return complex(y[-1])
    npts = nfit or min(len(s), 3 * (len(corrections) + 1))
    npts = max(npts, len(corrections) + 2)
    if npts > len(s):
        return complex(y[-1])
    aa, yy = a[-npts:], y[-npts:]
    cols = [np.ones_like(aa)] + [(aa / aa[0]) ** q for q in corrections]
    A = np.stack(cols, axis=1)
    if np.linalg.cond(A) > 1e12:
        return complex(y[-1])
    coef, *_ = np.linalg.lstsq(A.astype(complex), yy, rcond=None)
    return complex(coef[0])


# differentiation

def _cheb_weights(npts: int, order: int) -> np.ndarray:
    """Weights w_i with D^order p(0) = sum w_i y_i for the interpolant on [-1, 1]."""
    nodes = np.cos(np.pi * (np.arange(npts) + 0.5) / npts)
    eye = np.eye(npts)
    coefs = C.chebfit(nodes, eye, npts - 1)
    return C.chebval(0.0, C.chebder(coefs, order)) if order else C.chebval(0.0, coefs)


_WEIGHT_CACHE: dict = {}


def window_derivative(fun: Callable[[float], complex], s: float, order: int,
                      npts: int = 16, rel_halfwidth: float = 1 / 3,
                      with_error: bool = False):
    """D^order fun at s from a Chebyshev interpolant on [s - h, s + h], h = |s| rel_halfwidth.

    The window never contains 0, so it is one-sided with respect to the
    singularity. With ``with_error`` the callable returns (value, error) and
    the result is (derivative, propagated error bound).
    """
    if order == 0 and not with_error:
        return complex(fun(s))
    key = (npts, order)
    if key not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[key] = _cheb_weights(npts, order)
    w = _WEIGHT_CACHE[key]
    h = abs(s) * rel_halfwidth
    nodes = np.cos(np.pi * (np.arange(npts) + 0.5) / npts)
    xs = s + h * nodes
    scale = (1.0 / h) ** order
    if with_error:
        pairs = [fun(float(x)) for x in xs]
        vals = np.array([complex(v) for v, _ in pairs])
        errs = np.array([float(e) for _, e in pairs])
        return complex(w @ vals) * scale, float(np.abs(w) @ errs) * scale
    vals = np.array([complex(fun(float(x))) for x in xs])
    return complex(w @ vals) * scale


def phi_derivative(f, m: int, l: int, s: float, order: int, q: QuadSpec = QuadSpec(),
                   method: str = "chebyshev") -> complex:
    """D^order phi_{f,l} at s (s != 0)."""
    if method == "exact":
        return script_f_ds(f, m, l, 1.0, s, order, q)
    return window_derivative(lambda x: phi(f, m, l, x, q), s, order)


# singular profile terms

def is_log_index(m: int, j: int) -> bool:
    return j % m == (m - 2) % m


def _falling(p: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= p - i
    return out


def singular_term(m: int, j: int, s: float, order: int = 0) -> float:
    """D^order of |s|^{o(j)}, times -log|s| when j = m-2 mod m."""
    p = float(grading.order(m, j))
    x = abs(s)
    sgn = 1.0 if s > 0 else -1.0
    if not is_log_index(m, j):
        return sgn ** order * _falling(p, order) * x ** (p - order)
    val = _falling(p, order) * x ** (p - order) * math.log(x)
    for i in range(1, order + 1):
        val += math.comb(order, i) * _falling(p, order - i) * x ** (p - order) * (-1) ** (i - 1) * math.factorial(i - 1)
    return -(sgn ** order) * val


def thm_c_parameters(m: int, k: int) -> tuple[int, Fraction]:
    o = grading.order(m, k)
    n = math.ceil(o)
    return n, n - o


def thm_c_expected(f: ComplexJet, m: int, l: int, parity: int, k: int) -> complex:
    n, b = thm_c_parameters(m, k)
    sign = (-1) ** ((1 - parity) * (n + 1))
    return sign * math.factorial(n + 1) / math.factorial(k) * float(binom_real(b, n + 1)) \
        * script_c(f, m, k, 2 * l + parity)


def _signed_grid(grid, parity: int) -> list[float]:
    return [(-1.0 if parity else 1.0) * abs(s) for s in grid]


def thm_c_limit(f: ComplexJet, m: int, l: int, parity: int, k: int, q: QuadSpec = QuadSpec(),
                grid: Sequence[float] = DEFAULT_GRID, subtract_lower: bool = True,
                method: str = "chebyshev", tol: float = 1e-2,
                corrections: Sequence[float] | None = None) -> LimitReport:
    """lim |s|^{b+1} D^{n+1} phi_{f,l}(s) as s -> 0 on the side given by parity."""
    n, b = thm_c_parameters(m, k)
    ss = _signed_grid(grid, parity)
    lower = []
    if subtract_lower:
        for j in range(k):
            c = script_c(f, m, j, 2 * l + parity)
            if abs(c) > 0:
                lower.append((j, c / math.factorial(j)))
    values = []
    for s in ss:
        d = phi_derivative(f, m, l, s, n + 1, q, method)
        for j, c in lower:
            d -= c * singular_term(m, j, s, n + 1)
        values.append(d)
    bf = float(b)
    if corrections is None:
        corrections = [bf + 1, bf + 2]
        top = f.max_degree()
        corrections += [Fraction(kk - k, m) for kk in range(k + 1, min(top, k + m) + 1)]
    samples = list(zip(ss, values))
    est = power_limit(samples, bf + 1, corrections)
    expected = thm_c_expected(f, m, l, parity, k)
    return make_report(est, expected, ss, corrections, tol, f"thmC m={m} k={k} l={l} parity={parity}",
                       [abs(s) ** (bf + 1) * v for s, v in samples])


def verify_g_limit(m: int, l: int, a1: int, a2: int, q: QuadSpec = QuadSpec(),
                   grid: Sequence[float] = DEFAULT_GRID, tol: float = 1e-3) -> tuple[LimitReport, LimitReport]:
    """One-sided limits of |s|^{(a1+a2-m)/m} G^l_{a1,a2}(1, s) for s -> 0+ and 0-."""
    if a1 + a2 <= m:
        raise ValueError("the limit needs a1 + a2 > m")
    p = (a1 + a2 - m) / m
    roots = RootsOfUnity(m)
    b = beta_like(Fraction(a1, m), Fraction(a2, m))
    reports = []
    for parity in (0, 1):
        ss = _signed_grid(grid, parity)
        samples = [(s, g_fun(m, l, a1, a2, 1.0, s, q)) for s in ss]
        corrections = sorted({p, p + 1, 1.0, 2.0})
        est = power_limit(samples, p, corrections)
        expected = roots.theta0_pow((2 * l + parity) * (a2 - a1)) * b
        rep = make_report(est, expected, ss, corrections, tol,
                          f"glimit m={m} a=({a1},{a2}) l={l} {'-' if parity else '+'}")
        if abs(expected) == 0:
            rep.rel_err = abs(est)
        reports.append(rep)
    return reports[0], reports[1]


@dataclass
class Decomposition:
    coefficients: list
    expected: list
    analytic: list
    remainder_diag: float
    window_diag: list
    grid: list
    dropped: list = field(default_factory=list)

    def growth_ok(self, factor: float = 2.0, floor: float = 1e-3) -> bool:
        """Deepest resolved window is at most ``factor`` times the previous one.

        Differences below ``floor`` (the resolution threshold) are not
        meaningful and count as bounded.
        """
        if len(self.window_diag) < 2:
            return True
        prev, last = self.window_diag[-2], self.window_diag[-1]
        return last <= factor * prev + floor

    def max_coefficient_error(self) -> float:
        scale = max([abs(e) for e in self.expected] + [1.0])
        return max((abs(c - e) for c, e in zip(self.coefficients, self.expected)), default=0.0) / scale


def decompose_phi(f: ComplexJet, m: int, l: int, parity: int, k: int, q: QuadSpec = QuadSpec(),
                  s_min: float = 1e-6, s_max: float = 0.25, npts: int = 48,
                  poly_degree: int = 10, diag_grid: Sequence[float] = DEFAULT_GRID,
                  resolve_tol: float = 1e-3) -> Decomposition:
    """Fit phi on one side of 0 by the singular series for j < k plus a polynomial.

    Returns the fitted coefficients of |s|^{o(j)} (with -log|s| when
    j = m-2 mod m), the expected values C^j/j!, and the weighted derivative of
    the remainder on the diagnostic grid. Windows where the propagated
    quadrature error of that derivative exceeds ``resolve_tol`` are skipped
    and listed in ``dropped``.
    """
    sgn = -1.0 if parity else 1.0
    xs = np.geomspace(s_max, s_min, npts)
    ss = sgn * xs
    ys = np.array([phi(f, m, l, float(s), q) for s in ss])
    cols = [np.array([singular_term(m, j, float(s)) for s in ss]) for j in range(k)]
    cols += [xs ** d for d in range(poly_degree + 1)]
    A = np.stack(cols, axis=1)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise IllConditionedFitError("degenerate fit column")
    An = A / norms
    if np.linalg.cond(An) > 1e13:
        raise IllConditionedFitError("singular series fit is ill conditioned")
    coef, *_ = np.linalg.lstsq(An.astype(complex), ys, rcond=None)
    coef = coef / norms
    singular = [complex(c) for c in coef[:k]]
    expected = [script_c(f, m, j, 2 * l + parity) / math.factorial(j) for j in range(k)]
    n, b = thm_c_parameters(m, k)
    diag, dropped = [], []

    def val_err(x: float):
        r = phi_result(f, m, l, x, q)
        return r.value, r.error

    for x in diag_grid:
        s = sgn * abs(x)
        d, err = window_derivative(val_err, s, n + 1, with_error=True)
        d -= sum(c * singular_term(m, j, s, n + 1) for j, c in enumerate(singular))
        weight = abs(s) ** (float(b) + 1)
        if weight * err > resolve_tol:
            dropped.append(float(s))
            continue
        diag.append(weight * abs(d))
    if not diag:
        raise IllConditionedFitError("no diagnostic window resolves the remainder derivative")
    return Decomposition(singular, expected, [complex(c) for c in coef[k:]],
                         float(max(diag)), diag, list(map(float, ss)), dropped)


def dnds_profile(m: int, l: int, a1: int, a2: int, n: int, q: QuadSpec = QuadSpec(),
                 grid: Sequence[float] = DEFAULT_GRID) -> list[tuple[float, complex, complex]]:
    """(s, D^n G_{a1,a2}(1,s), leading singular term) along the grid."""
    c = math.factorial(n) * (-2j) ** n * float(binom_real(Fraction(-a2, m), n))
    out = []
    for s in grid:
        dn = window_derivative(lambda x: g_fun(m, l, a1, a2, 1.0, x, q), s, n)
        lead = c * g_fun(m, l, a1, a2 + n * m, 1.0, s, q) if c != 0 else 0j
        out.append((float(s), dn, lead))
    return out


def dnds_consistency(m: int, l: int, a1: int, a2: int, n: int, q: QuadSpec = QuadSpec(),
                     grid: Sequence[float] = DEFAULT_GRID) -> float:
    """Largest drift of D^n G - n!(-2i)^n binom(-a2/m, n) G_{a1,a2+nm} from its coarsest value."""
    if not 0 <= n <= 4:
        raise ValueError("n must lie in 0..4")
    prof = dnds_profile(m, l, a1, a2, n, q, grid)
    diffs = [d - lead for _, d, lead in prof]
    return float(max(abs(d - diffs[0]) for d in diffs))


# sector extension

def underline_k(m: int, k: int) -> int:
    return max(math.ceil(grading.order(m, k)) + (m - 2), 0)


def extension_hypotheses(f: ComplexJet, m: int, L: int, k: int, tol: float = 1e-10) -> list[str]:
    """Names of distributions that should vanish for the sector extension to hold but do not."""
    scale = 1.0 + float(np.abs(f.coeffs).max(initial=0.0))
    bad = []
    for j in range(min(underline_k(m, k), f.order + 1)):
        for i in relevant_indices(m, j):
            if abs(partial_dist(f, m, j, i)) > tol * scale:
                bad.append(f"partial^{j}_{i}")
    for j in range(min(k, f.order + 1)):
        if abs(script_c(f, m, j, L)) > tol * scale:
            bad.append(f"C^{j}_{L}")
    return bad


def _probe_point(m: int, L: int, u0: float, h: float) -> complex:
    s = -h if L % 2 else h
    return root_branch(m, L // 2, complex(u0, s))


def continuity_constant(f: ComplexJet, m: int, L: int, k: int, h: float, q: QuadSpec = QuadSpec(),
                        u0: float = 1.0) -> float:
    """Modulus-of-continuity constant of F_f at distance h from the slit side of sector L.

    F_f is sampled along w = G_{L//2}(u0 + i s); the grade e(m, k) = n + r
    selects the derivative order n and the modulus (power or eta).
    """
    e = grading.exponent(m, k)
    sgn = -1.0 if L % 2 else 1.0

    def along(s: float) -> complex:
        return big_f(f, m, root_branch(m, L // 2, complex(u0, s)), q)

    n = e.derivative_order
    if n < 0:
        val = abs(along(sgn * h))
        weight = 1 + abs(math.log(h)) if e.eta_flag else h ** float(e.base)
        return val / weight
    d1 = window_derivative(along, sgn * h, n)
    d2 = window_derivative(along, sgn * 2 * h, n)
    mod = grading.eta_modulus(h) if e.eta_flag else h ** float(e.holder_part)
    return abs(d1 - d2) / mod


def sector_extension_check(f: ComplexJet, m: int, L: int, k: int, q: QuadSpec = QuadSpec(),
                           probe: float = 1e-4, u0: float = 1.0, enforce: bool = True) -> float:
    """Continuity constant at scale ``probe`` for the extension of F_f to the closed sector L."""
    if enforce:
        bad = extension_hypotheses(f, m, L, k)
        if bad:
            raise HypothesisViolatedError(f"nonzero distributions: {', '.join(bad)}", bad[0])
    return continuity_constant(f, m, L, k, probe, q, u0)
