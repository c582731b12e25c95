"""Self-contained verification suites, one per acceptance criterion.

Every suite returns ``{"suite", "checks": [{"name", "pass", "err",
"tolerance"}], "pass", "seconds"}``. Seeds are fixed so reruns are identical.
"""
from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import grading
from .asymptotics import decompose_phi, sector_extension_check, extension_hypotheses, \
    thm_c_limit, verify_g_limit
from .distributions import partial_dist_rational, recover_partial, relevant_indices, \
    script_c, script_c_all, script_c_direct, weighted_sum, beta_weight, partial_dist
from .iet_spaces import IetSpec, all_boundary_constants, geometric_type_check, hold_bound, \
    keane_check, p_a_seminorm, parse_number, rotation, sample_piecewise
from .jets import SaddleModel, constant_jet, monomial_jet, polynomial_jet, random_jet
from .saddle_flow import transit_check
from .sector_integrals import phi
from .specialfn import beta_branch, beta_like, binom_real, unit_phase


def _check(name: str, err: float, tol: float, ok: bool | None = None) -> dict:
    err = float(err)
    return {"name": name, "pass": bool(err <= tol if ok is None else ok), "err": err, "tolerance": tol}


def _suite(name: str, checks: list, t0: float) -> dict:
    checks = sorted(checks, key=lambda c: c["name"])
    return {"suite": name, "checks": checks, "pass": all(c["pass"] for c in checks),
            "seconds": round(time.perf_counter() - t0, 3)}


# 1 --------------------------------------------------------------------------

def beta_grid() -> list[tuple[Fraction, Fraction]]:
    """All pairs of non-integers in (-1, 2) with denominators 2..6."""
    vals = sorted({Fraction(p, m) for m in range(2, 7) for p in range(-m + 1, 2 * m)
                   if Fraction(p, m).denominator > 1})
    return [(x, y) for x in vals for y in vals]


def shift_identity_applies(x: Fraction, y: Fraction, n: int) -> bool:
    """The shift identity needs the regular branch, or x+y+n to stay in Z_{<=1}."""
    if beta_branch(x, y) == "regular":
        return True
    s = x + y + n
    return s.denominator == 1 and s <= 1


def suite_beta() -> dict:
    t0 = time.perf_counter()
    grid = beta_grid()
    conj = shift = refl = half = 0.0
    n_shift = n_half = 0
    bf = lambda x, n: float(binom_real(x, n))
    for x, y in grid:
        b = beta_like(x, y)
        byx = beta_like(y, x)
        conj = max(conj, abs(byx - b.conjugate()), abs(byx - unit_phase(x - y) * b))
        for n in range(7):
            if shift_identity_applies(x, y, n):
                lhs = (2j) ** n * bf(-y, n) * beta_like(x, y + n)
                mid = bf(x + y + n - 2, n) * b
                rhs = (-2j) ** n * bf(-x, n) * beta_like(x + n, y)
                shift = max(shift, abs(lhs - mid), abs(mid - rhs))
                n_shift += 1
            r = bf(-x, n) * beta_like(x + n, y - n) - (-1) ** n * bf(-y + n, n) * b
            refl = max(refl, abs(r))
        if x + y == 1:
            half = max(half, abs(b - 1 - unit_phase(y - x)))
            n_half += 1
    tol = 1e-12
    checks = [
        _check("conjugation", conj, tol),
        _check("shift n<=6", shift, tol),
        _check("reflection n<=6", refl, tol),
        _check("x+y=1", half, tol),
        _check("grid size >= 500", 0.0, 0.0, len(grid) >= 500 and n_shift > 0 and n_half > 0),
    ]
    return _suite("beta", checks, t0)


# 2 / 4 shared corpus -------------------------------------------------------

def jet_corpus(n: int = 200, seed: int = 20240601) -> list[tuple[int, object]]:
    rng = np.random.default_rng(seed)
    return [(2 + i % 4, random_jet(rng, order=8)) for i in range(n)]


def suite_dual(n: int = 200) -> dict:
    t0 = time.perf_counter()
    worst = 0.0
    for m, jet in jet_corpus(n):
        for k in range(9):
            a = np.array([script_c(jet, m, k, l) for l in range(2 * m)])
            b = np.array([script_c_direct(jet, m, k, l) for l in range(2 * m)])
            scale = max(float(np.abs(a).max()), float(np.abs(b).max()), 1e-300)
            worst = max(worst, float(np.abs(a - b).max()) / scale)
    return _suite("dual", [_check("script_c vs direct", worst, 1e-10)], t0)


def suite_exact() -> dict:
    t0 = time.perf_counter()
    checks = []
    for m in range(2, 6):
        for k in range(m - 1, 11):
            val = partial_dist_rational(monomial_jet(m - 1, k - m + 1), m, k, m - 1)
            ok = val is not None and val == (Fraction(math.factorial(k)), Fraction(0))
            err = math.inf if val is None else float(abs(val[0] - math.factorial(k)) + abs(val[1]))
            checks.append(_check(f"m={m} k={k}", err, 0.0, ok))
    return _suite("exact", checks, t0)


def annihilated_indices(m: int, k: int) -> list[int]:
    """j in 0..m-1 for which the weighted sum over all 2m sectors vanishes."""
    out = []
    for j in range(m):
        if j == m - 1 or j % m == (k - (m - 1)) % m or min(k, m - 2) < j <= m - 2:
            out.append(j)
    return out


def suite_relations(n: int = 200) -> dict:
    t0 = time.perf_counter()
    parity = annih = recov = 0.0
    for m, jet in jet_corpus(n):
        for k in range(9):
            c = script_c_all(jet, m, k)
            scale = max(max(abs(v) for v in c), 1.0)
            for l in range(m):
                parity = max(parity, abs(c[l + m] - (-1) ** k * c[l]) / scale)
            for j in annihilated_indices(m, k):
                annih = max(annih, abs(weighted_sum(c, m, k, j)) / scale)
            for j in relevant_indices(m, k):
                target = beta_weight(m, k, j) * partial_dist(jet, m, k, j)
                recov = max(recov, abs(recover_partial(c, m, k, j) - target) / scale)
    tol = 1e-10
    checks = [_check("parity", parity, tol), _check("annihilation", annih, tol),
              _check("recovery", recov, tol)]
    return _suite("relations", checks, t0)


# 5 -------------------------------------------------------------------------

G_LIMIT_CASES = ((2, 2, 2), (3, 2, 2), (3, 2, 4), (4, 3, 3))


def suite_g_limit() -> dict:
    t0 = time.perf_counter()
    checks = []
    for m, a1, a2 in G_LIMIT_CASES:
        for l in range(m):
            plus, minus = verify_g_limit(m, l, a1, a2)
            for sign, rep in (("+", plus), ("-", minus)):
                checks.append(_check(f"m={m} a=({a1},{a2}) l={l} {sign}", rep.rel_err, 1e-3))
    return _suite("g_limit", checks, t0)


# 6 -------------------------------------------------------------------------

def suite_thm_c() -> dict:
    t0 = time.perf_counter()
    checks = []
    rep = thm_c_limit(constant_jet(1.0), 2, 0, 0, 0)
    checks.append(_check("m=2 k=0 f=1 -> -2", abs(rep.estimate + 2) / 2, 5e-3))
    cases = [(0, constant_jet(1.0), "1"), (1, monomial_jet(1, 0), "w"), (1, monomial_jet(0, 1), "wbar")]
    for k, f, label in cases:
        for l in range(3):
            for parity in (0, 1):
                rep = thm_c_limit(f, 3, l, parity, k)
                checks.append(_check(f"m=3 k={k} f={label} L={2 * l + parity}", rep.rel_err, 1e-2))
    # C^0 vanishes for f = w, so the k = 0 limit collapses relative to f = 1
    generic = abs(thm_c_limit(constant_jet(1.0), 2, 0, 0, 0).estimate)
    for parity in (0, 1):
        est = thm_c_limit(monomial_jet(1, 0), 2, 0, parity, 0).estimate
        checks.append(_check(f"vanishing C^0 m=2 parity={parity}", abs(est) / generic, 1e-2))
    return _suite("thm_c", checks, t0)


# 7 -------------------------------------------------------------------------

def suite_decompose() -> dict:
    t0 = time.perf_counter()
    checks = []
    for m in (2, 3):
        for d in range(4):
            for i in range(d + 1):
                f = monomial_jet(i, d - i)
                k = d + 1
                for parity in (0, 1):
                    dec = decompose_phi(f, m, 0, parity, k)
                    name = f"m={m} f=w^{i}wbar^{d - i} k={k} parity={parity}"
                    checks.append(_check(name + " coefficients", dec.max_coefficient_error(), 5e-3))
                    last, prev = (dec.window_diag[-1], dec.window_diag[-2]) if len(dec.window_diag) > 1 \
                        else (0.0, 0.0)
                    checks.append(_check(name + " remainder growth", max(last - 2 * prev, 0.0), 1e-3,
                                         dec.growth_ok()))
    return _suite("decompose", checks, t0)


# 8 -------------------------------------------------------------------------

def suite_transit(eps: float = 0.5) -> dict:
    t0 = time.perf_counter()
    checks = []
    flat = SaddleModel(2, constant_jet(1.0), eps)
    tilted = SaddleModel(3, polynomial_jet({(0, 0): 1.0, (1, 0): 0.05, (0, 1): 0.05}), eps)
    cases = [(flat, None, "1", 1e-6), (flat, monomial_jet(1, 0), "w", 1e-6),
             (flat, monomial_jet(1, 1), "w wbar", 1e-6), (tilted, monomial_jet(1, 0), "w", 1e-4)]
    for saddle, f, label, tol in cases:
        for r in (0.5, 0.1, 0.01):
            for l in range(saddle.m):
                res = transit_check(saddle, l, r * eps, f)
                name = f"m={saddle.m} f={label} l={l} s/eps={r}"
                checks.append(_check(name, res.rel_err, tol))
                checks.append(_check(name + " drift", res.orbit.hamiltonian_drift, 1e-9))
    return _suite("transit", checks, t0)


# 9 -------------------------------------------------------------------------

def _log_model(s):
    """phi for f = 1, m = 2, l = 0 in closed form, with its first two derivatives."""
    return [2 * np.arcsinh(1 / s), -2 / (s * np.sqrt(s * s + 1)),
            2 * (2 * s * s + 1) / (s * s * (s * s + 1) ** 1.5)]


def geometric_fixtures() -> list[tuple[str, IetSpec, dict, bool]]:
    rot = rotation(0.5 * (math.sqrt(5) - 1))
    smooth = {a: (lambda dl, dr, k: [np.cos(dl), -np.sin(dl), -np.cos(dl)][k]) for a in rot.alphabet}
    # saddle-local profile: one separatrix through the A/B discontinuity
    saddle_local = {"A": lambda dl, dr, k: (-1) ** k * _log_model(dr)[k],
                    "B": lambda dl, dr, k: _log_model(dl)[k]}
    both_right = {"A": lambda dl, dr, k: (-1) ** k * _log_model(dr)[k],
                  "B": lambda dl, dr, k: (-1) ** k * _log_model(dr)[k]}
    return [("smooth", rot, smooth, True), ("saddle-local", rot, saddle_local, True),
            ("both right ends", rot, both_right, False)]


def suite_pa() -> dict:
    t0 = time.perf_counter()
    checks = []
    unit = IetSpec(("A",), {"A": 1}, {"A": 1}, {"A": 1.0})
    for a in (0.3, 0.5, 0.9):
        s = sample_piecewise(unit, {"A": lambda dl, dr, k, a=a: [dl ** -a, -a * dl ** (-a - 1)][k]}, 0)
        checks.append(_check(f"p_a(x^-a) a={a}", abs(p_a_seminorm(s, a) - a) / a, 1e-2))
    spec = IetSpec(("A", "B", "C"), {"A": 1, "B": 2, "C": 3}, {"A": 3, "B": 2, "C": 1},
                   {"A": 0.3, "B": 0.45, "C": 0.25})
    for a in (0.0, 0.3, 0.7):
        if a == 0:
            fn = lambda dl, dr, k: [-np.log(dl) + 0.4 * np.log(dr) + 1, -1 / dl - 0.4 / dr][k]
        else:
            fn = lambda dl, dr, k, a=a: [dl ** -a - 0.5 * dr ** -a + 0.2, -a * dl ** (-a - 1) - 0.5 * a * dr ** (-a - 1)][k]
        s = sample_piecewise(spec, {"A": fn, "B": fn, "C": fn}, 0)
        pairs = hold_bound(s, a)
        excess = max(v - b for v, b in pairs)
        checks.append(_check(f"pointwise bound a={a}", max(excess, 0.0), 0.0))
    # the saddle-local fixture must agree with the sector integral
    err = max(abs(phi(None, 2, 0, x) - _log_model(abs(x))[0]) / abs(_log_model(abs(x))[0])
              for x in (0.3, -0.01, 1e-5))
    checks.append(_check("saddle-local profile vs sector integral", err, 1e-10))
    for name, spec_, funcs, expected in geometric_fixtures():
        consts = all_boundary_constants(sample_piecewise(spec_, funcs, 0), 0, 0.0)
        got = geometric_type_check(consts, spec_)
        checks.append(_check(f"geometric type {name}", 0.0 if got == expected else 1.0, 0.0))
    return _suite("pa", checks, t0)


# 10 ------------------------------------------------------------------------

def four_interval_iet() -> IetSpec:
    lam = {"A": math.sqrt(2) - 1, "B": math.sqrt(3) - 1.5, "C": math.pi / 10, "D": math.e / 10}
    return IetSpec(("A", "B", "C", "D"), {"A": 1, "B": 2, "C": 3, "D": 4},
                   {"A": 4, "B": 3, "C": 2, "D": 1}, lam)


def suite_keane() -> dict:
    t0 = time.perf_counter()
    golden = rotation(parse_number("(-1+sqrt(5))/2"))
    rational = rotation(Fraction(3, 7))
    first_fail = next((d for d in range(1, 8) if not keane_check(rational, d)), None)
    checks = [
        _check("golden rotation depth 1e4", 0.0, 0.0, keane_check(golden, 10_000)),
        _check("rotation 3/7 fails by depth 7", 0.0 if first_fail else 1.0, 0.0, first_fail is not None),
        _check("4-interval depth 1e3", 0.0, 0.0, keane_check(four_interval_iet(), 1000)),
    ]
    return _suite("keane", checks, t0)


# 11 ------------------------------------------------------------------------

def suite_converse() -> dict:
    t0 = time.perf_counter()
    m, L, k = 2, 0, 2
    bad = constant_jet(1.0)
    good = monomial_jet(2, 0)
    c1 = sector_extension_check(bad, m, L, k, probe=1e-2, enforce=False)
    c2 = sector_extension_check(bad, m, L, k, probe=1e-4, enforce=False)
    g1 = sector_extension_check(good, m, L, k, probe=1e-2)
    g2 = sector_extension_check(good, m, L, k, probe=1e-4)
    growth = c2 / c1
    vary = max(g1, g2) / min(g1, g2)
    checks = [
        _check("violating jet growth >= 10", 1 / growth, 0.1),
        _check("satisfying jet varies < 2", vary, 2.0, vary < 2.0),
        _check("only C^0 violated", 0.0, 0.0,
               [h for h in extension_hypotheses(bad, m, L, k) if h.startswith("C^")] == ["C^0_0"]),
    ]
    return _suite("converse", checks, t0)


# 12 ------------------------------------------------------------------------

def r_grid(m: int, n: int = 100) -> list[Fraction]:
    lo = Fraction(-(m - 2), m)
    # include the breakpoints j/m and generic values in between
    pts = [lo + Fraction(i, 2 * m) for i in range(n // 2)]
    pts += [lo + Fraction(7 * i + 3, 97) for i in range(n - len(pts))]
    return pts


def suite_grading() -> dict:
    t0 = time.perf_counter()
    expkr = rkr = 0
    total = 0
    for m in range(2, 7):
        for r in r_grid(m):
            total += 1
            if grading.max_k_below(m, r) + 1 != math.ceil(m * r + (m - 2)):
                expkr += 1
            if not math.ceil(r) + 1 <= grading.k_r(m, r):
                rkr += 1
    checks = [_check(f"max k below r identity ({total} cases)", expkr, 0),
              _check(f"ceil(r)+1 <= k_r ({total} cases)", rkr, 0)]
    return _suite("grading", checks, t0)


SUITES: dict[str, Callable[[], dict]] = {
    "beta": suite_beta,
    "dual": suite_dual,
    "exact": suite_exact,
    "relations": suite_relations,
    "g_limit": suite_g_limit,
    "thm_c": suite_thm_c,
    "decompose": suite_decompose,
    "transit": suite_transit,
    "pa": suite_pa,
    "keane": suite_keane,
    "converse": suite_converse,
    "grading": suite_grading,
}


def run_suites(names=None) -> list[dict]:
    names = list(SUITES) if not names or names == ["all"] else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n]() for n in names]
