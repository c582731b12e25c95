"""Interval exchange transformations and the C^{n+P_a} norm apparatus.

Lengths may be floats, Fractions, or :class:`QuadraticNumber` values from a
single field Q(sqrt d). With exact lengths the Keane check compares orbit
points exactly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .asymptotics import power_limit, singular_term, is_log_index
from .errors import DomainError, MissingDerivativeError, NoLimitError
from . import grading


@dataclass(frozen=True)
class QuadraticNumber:
    """a + b sqrt(d) with rational a, b and square-free d > 1."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d < 2:
            raise DomainError("radicand must be >= 2")

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise DomainError("mixed quadratic fields")
            return other if other.b != 0 else QuadraticNumber(other.a, 0, self.d)
        if isinstance(other, Rational):
            return QuadraticNumber(Fraction(other), 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return float(self) + other
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return float(self) * other
        return QuadraticNumber(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        return sa if lhs > rhs else (sb if rhs > lhs else 0)

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, float) else NotImplemented
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"{self.a}+{self.b}*sqrt({self.d})"


_SURD = re.compile(r"^\(?([+-]?[\d./]+)?\s*([+-]\s*[\d./]*)?\*?sqrt\((\d+)\)\)?(?:/([\d]+))?$")


def parse_number(token: str):
    """Parse '3/7', '0.25', 'sqrt(5)', '-1+sqrt(5)' or '(-1+sqrt(5))/2'."""
    token = token.replace(" ", "")
    if "sqrt" not in token:
        if re.fullmatch(r"[+-]?\d+(/\d+)?", token):
            return Fraction(token)
        return float(token)
    m = re.fullmatch(r"\(?([+-]?[\d./]*?)([+-]?[\d./]*)\*?sqrt\((\d+)\)\)?(?:/(\d+))?", token)
    if not m:
        raise DomainError(f"cannot parse number {token!r}")
    a_txt, b_txt, d_txt, den = m.groups()
    a = Fraction(a_txt) if a_txt not in ("", "+", "-") else Fraction(0)
    if b_txt in ("", "+"):
        b = Fraction(1)
    elif b_txt == "-":
        b = Fraction(-1)
    else:
        b = Fraction(b_txt)
    div = Fraction(int(den)) if den else Fraction(1)
    return QuadraticNumber(a / div, b / div, int(d_txt))


def _is_exact(x) -> bool:
    return isinstance(x, (Rational, QuadraticNumber))


@dataclass(frozen=True)
class IetSpec:
    """Labels, the two position maps pi0/pi1 (label -> 1..d) and lengths."""

    alphabet: tuple
    pi0: Mapping
    pi1: Mapping
    lengths: Mapping

    def __post_init__(self):
        d = len(self.alphabet)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(set(self.alphabet)) != d:
            raise DomainError("labels must be distinct")
        for name, p in (("pi0", self.pi0), ("pi1", self.pi1)):
            if set(p) != set(self.alphabet) or sorted(p.values()) != list(range(1, d + 1)):
                raise DomainError(f"{name} must be a bijection onto 1..{d}")
        if set(self.lengths) != set(self.alphabet):
            raise DomainError("lengths must be given for every label")
        if any(not (x > 0) for x in self.lengths.values()):
            raise DomainError("lengths must be positive")

    @property
    def d(self) -> int:
        return len(self.alphabet)

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in self.lengths.values())

    def order0(self) -> list:
        return sorted(self.alphabet, key=lambda a: self.pi0[a])

    def order1(self) -> list:
        return sorted(self.alphabet, key=lambda a: self.pi1[a])

    def total_length(self):
        return sum((self.lengths[a] for a in self.alphabet), Fraction(0) if self.exact else 0.0)

    def _cumulative(self, order) -> dict:
        acc = Fraction(0) if self.exact else 0.0
        out = {}
        for a in order:
            out[a] = acc
            acc = acc + self.lengths[a]
        return out

    def left_endpoints(self) -> dict:
        return self._cumulative(self.order0())

    def image_left_endpoints(self) -> dict:
        return self._cumulative(self.order1())

    def interval(self, alpha) -> tuple:
        l = self.left_endpoints()[alpha]
        return l, l + self.lengths[alpha]

    def label_at(self, position: int, which: int = 0):
        p = self.pi0 if which == 0 else self.pi1
        return next(a for a in self.alphabet if p[a] == position)


def rotation(alpha_len, total=1) -> IetSpec:
    """Two-interval exchange A B -> B A, i.e. the rotation by total - alpha_len."""
    return IetSpec(("A", "B"), {"A": 1, "B": 2}, {"A": 2, "B": 1},
                   {"A": alpha_len, "B": total - alpha_len})


def iet_apply(spec: IetSpec, x):
    total = spec.total_length()
    if not (0 <= x < total):
        raise DomainError(f"x = {x} outside [0, {total})")
    lefts = spec.left_endpoints()
    images = spec.image_left_endpoints()
    for a in reversed(spec.order0()):
        if lefts[a] <= x:
            return x - lefts[a] + images[a]
    raise DomainError("no interval contains x")  # unreachable for valid specs


def discontinuities(spec: IetSpec) -> list:
    lefts = spec.left_endpoints()
    return [lefts[a] for a in spec.order0()[1:]]


def keane_check(spec: IetSpec, depth: int, tol: float = 1e-12) -> bool:
    """True iff no forward orbit of a discontinuity hits a discontinuity within ``depth`` steps."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    disc = discontinuities(spec)
    if not disc:
        return True
    if spec.exact:
        targets = set(disc)
        for b in disc:
            x = b
            for _ in range(depth):
                x = iet_apply(spec, x)
                if x in targets:
                    return False
        return True
    targets = np.array([float(t) for t in disc])
    total = float(spec.total_length())
    fspec = IetSpec(spec.alphabet, spec.pi0, spec.pi1, {a: float(v) for a, v in spec.lengths.items()})
    for b in targets:
        x = float(b)
        for _ in range(depth):
            x = iet_apply(fspec, min(max(x, 0.0), np.nextafter(total, 0)))
            if np.min(np.abs(targets - x)) <= tol:
                return False
    return True


def parse_iet(text: str) -> IetSpec:
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, rest = line.split(":", 1)
        else:
            key, _, rest = line.partition(" ")
        key = key.strip().lower()
        if key not in ("labels", "pi0", "pi1", "lambda"):
            raise DomainError(f"line {lineno}: unknown key {key!r}")
        fields[key] = rest.split()
    missing = {"labels", "pi0", "pi1", "lambda"} - set(fields)
    if missing:
        raise DomainError(f"missing lines: {', '.join(sorted(missing))}")
    labels = fields["labels"]
    if len(fields["lambda"]) != len(labels):
        raise DomainError("one length per label is required")
    pi0 = {a: i + 1 for i, a in enumerate(fields["pi0"])}
    pi1 = {a: i + 1 for i, a in enumerate(fields["pi1"])}
    lengths = {a: parse_number(t) for a, t in zip(labels, fields["lambda"])}
    return IetSpec(tuple(labels), pi0, pi1, lengths)


def read_iet(path) -> IetSpec:
    return parse_iet(Path(path).read_text())


def format_iet(spec: IetSpec) -> str:
    return "\n".join([
        "labels " + " ".join(map(str, spec.alphabet)),
        "pi0: " + " ".join(map(str, spec.order0())),
        "pi1: " + " ".join(map(str, spec.order1())),
        "lambda: " + " ".join(str(spec.lengths[a]) for a in spec.alphabet),
    ]) + "\n"


# sampled functions on the exchanged intervals

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class LabelSamples:
    """Samples on one interval, in local coordinates.

    ``dl``/``dr`` are the distances to the left/right endpoints, ``weights``
    integrate over the covered part, and ``knots_l``/``knots_r`` index the
    dyadic cell boundaries used for tail and limit extrapolation.
    """

    left: float
    right: float
    dl: np.ndarray
    dr: np.ndarray
    weights: np.ndarray
    derivs: np.ndarray  # shape (n + 2, npts)
    knots_l: np.ndarray
    knots_r: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.left + self.dl

    @property
    def length(self) -> float:
        return self.right - self.left


@dataclass
class PiecewiseSamples:
    spec: IetSpec
    n: int
    labels: dict
    ratio: float = 0.5
    depth: int = 40

    def scaled(self, c: complex) -> "PiecewiseSamples":
        return PiecewiseSamples(self.spec, self.n, {a: LabelSamples(
            s.left, s.right, s.dl, s.dr, s.weights, s.derivs * c, s.knots_l, s.knots_r)
            for a, s in self.labels.items()}, self.ratio, self.depth)

    def __add__(self, other: "PiecewiseSamples") -> "PiecewiseSamples":
        n = min(self.n, other.n)
        return PiecewiseSamples(self.spec, n, {a: LabelSamples(
            s.left, s.right, s.dl, s.dr, s.weights,
            s.derivs[: n + 2] + other.labels[a].derivs[: n + 2], s.knots_l, s.knots_r)
            for a, s in self.labels.items()}, self.ratio, self.depth)


def _label_grid(length: float, depth: int):
    """Gauss nodes on dyadic cells toward both ends plus the cell boundaries."""
    half = length / 2
    bounds = half * 0.5 ** np.arange(depth + 1)  # half, half/2, ..., half 2^-depth
    nodes, weights = [], []
    for hi, lo in zip(bounds[:-1], bounds[1:]):
        # Gauss-Legendre in log(distance) keeps power laws well resolved
        t = 0.5 * (np.log(hi) + np.log(lo)) + 0.5 * (np.log(hi) - np.log(lo)) * _GL_NODES
        w = 0.5 * (np.log(hi) - np.log(lo)) * _GL_WEIGHTS * np.exp(t)
        nodes.append(np.exp(t))
        weights.append(w)
    cell_d = np.concatenate(nodes)
    cell_w = np.concatenate(weights)
    # left side: dl = cell_d; right side: dr = cell_d
    dl = np.concatenate([cell_d, length - cell_d, bounds, length - bounds[1:]])
    dr = np.concatenate([length - cell_d, cell_d, length - bounds, bounds[1:]])
    w = np.concatenate([cell_w, cell_w, np.zeros(len(bounds)), np.zeros(len(bounds) - 1)])
    nb = len(bounds)
    base = 2 * len(cell_d)
    knots_l = base + np.arange(nb)            # dl = bounds
    knots_r = np.concatenate([[base], base + nb + np.arange(nb - 1)])  # dr = bounds
    return dl, dr, w, knots_l, knots_r


def sample_piecewise(spec: IetSpec, funcs: Mapping, n: int, depth: int = 40) -> PiecewiseSamples:
    """Sample D^0..D^{n+1} of a piecewise function.

    ``funcs[label](dl, dr, k)`` returns D^k phi at distance dl from the left
    and dr from the right endpoint (arrays). Labels missing from ``funcs``
    are treated as zero.
    """
    out = {}
    for a in spec.alphabet:
        l, r = (float(v) for v in spec.interval(a))
        dl, dr, w, kl, kr = _label_grid(r - l, depth)
        fn = funcs.get(a)
        rows = []
        for k in range(n + 2):
            if fn is None:
                rows.append(np.zeros_like(dl, dtype=complex))
            else:
                rows.append(np.asarray(fn(dl, dr, k), dtype=complex) * np.ones_like(dl))
        out[a] = LabelSamples(l, r, dl, dr, w, np.array(rows), kl, kr)
    return PiecewiseSamples(spec, n, out, 0.5, depth)


def _need(samples: PiecewiseSamples, k: int) -> None:
    if k > samples.n + 1:
        raise MissingDerivativeError(f"samples hold derivatives up to {samples.n + 1}, need {k}")


def _tail(dist: np.ndarray, vals: np.ndarray, knots: np.ndarray) -> float:
    """Integral of |g| over (0, innermost knot) assuming a power law there."""
    d1, d0 = dist[knots[-1]], dist[knots[-2]]
    g1, g0 = abs(vals[knots[-1]]), abs(vals[knots[-2]])
    if g1 == 0:
        return 0.0
    if g0 == 0:
        return g1 * d1
    p = math.log(g1 / g0) / math.log(d1 / d0)
    if p <= -1:
        return math.inf
    return g1 * d1 / (p + 1)


def l1_norm(samples: PiecewiseSamples, k: int, window: tuple | None = None) -> float:
    """||D^k phi||_{L^1}, optionally on the window ('left'|'right', label, eps)."""
    _need(samples, k)
    total = 0.0
    for a, s in samples.labels.items():
        vals = s.derivs[k]
        if window is not None:
            side, label, eps = window
            if a != label:
                continue
            dist = s.dl if side == "left" else s.dr
            mask = dist <= eps
            knots = s.knots_l if side == "left" else s.knots_r
            total += float(np.abs(vals[mask]) @ s.weights[mask]) + _tail(dist, vals, knots)
            continue
        total += float(np.abs(vals) @ s.weights)
        total += _tail(s.dl, vals, s.knots_l) + _tail(s.dr, vals, s.knots_r)
    return total


def _weighted_sup(s: LabelSamples, k: int, a: float, mask=None) -> float:
    vals = np.abs(s.derivs[k])
    half = s.length / 2
    left = s.dl <= half
    w = np.where(left, s.dl, s.dr) ** (1 + a)
    prod = vals * w
    if mask is not None:
        prod = prod[mask]
    return float(prod.max(initial=0.0))


def p_a_seminorm(samples: PiecewiseSamples, a: float, n: int | None = None) -> float:
    """p_a(D^n phi): grid supremum of |D^{n+1} phi| times the distance^{1+a} to the nearer end.

    A grid supremum is a lower bound for the true supremum.
    """
    if not 0 <= a < 1:
        raise DomainError("a must lie in [0, 1)")
    n = samples.n if n is None else n
    _need(samples, n + 1)
    return max(_weighted_sup(s, n + 1, a) for s in samples.labels.values())


def p_a_window(samples: PiecewiseSamples, a: float, k: int, side: str, label, eps: float) -> float:
    """sup over J of min(dist)^{1+a} |D^{k+1} phi| for J an endpoint window of length eps."""
    _need(samples, k + 1)
    s = samples.labels[label]
    dist = s.dl if side == "left" else s.dr
    return _weighted_sup(s, k + 1, a, dist <= eps)


def cnpa_norm(samples: PiecewiseSamples, n: int, a: float) -> float:
    return sum(l1_norm(samples, k) for k in range(n + 1)) + p_a_seminorm(samples, a, n)


def _endpoint_limit(dist: np.ndarray, vals: np.ndarray, knots: np.ndarray, a: float,
                    rtol: float) -> complex:
    d = dist[knots][1:]  # skip the midpoint knot
    y = vals[knots][1:] * d ** (1 + a)
    samples = list(zip(d[-12:], y[-12:]))
    scale = max(float(np.abs(y[-12:]).max()), 1e-300)
    diffs = np.abs(np.diff(y[-6:]))
    if diffs[-1] <= rtol * max(scale, 1.0):
        return complex(y[-1])
    if not diffs[-1] < diffs[0]:
        raise NoLimitError("weighted derivative does not settle toward the endpoint")
    est = power_limit(samples, 0.0)
    if abs(est - y[-1]) > 1e-2 * max(scale, 1e-12):
        raise NoLimitError("weighted derivative does not settle toward the endpoint")
    return est


def boundary_constants(samples: PiecewiseSamples, alpha, n: int, a: float,
                       rtol: float = 1e-9) -> tuple[complex, complex]:
    """(C+, C-) for label ``alpha``: one-sided limits of D^{n+1} phi times distance^{1+a}."""
    _need(samples, n + 1)
    s = samples.labels[alpha]
    vals = s.derivs[n + 1]
    cp = (-1) ** (n + 1) * _endpoint_limit(s.dl, vals, s.knots_l, a, rtol)
    cm = _endpoint_limit(s.dr, vals, s.knots_r, a, rtol)
    return complex(cp), complex(cm)


def all_boundary_constants(samples: PiecewiseSamples, n: int, a: float) -> dict:
    return {alpha: boundary_constants(samples, alpha, n, a) for alpha in samples.spec.alphabet}


def geometric_type_check(constants: Mapping, spec: IetSpec, n: int = 0, a: float = 0.0,
                         tol: float = 1e-8) -> bool:
    """Both products C-(pi0^-1(d)) C-(pi1^-1(d)) and C+(pi0^-1(1)) C+(pi1^-1(1)) vanish."""
    d = spec.d
    scale = max([abs(c) for pair in constants.values() for c in pair] + [1.0])
    right = constants[spec.label_at(d, 0)][1] * constants[spec.label_at(d, 1)][1]
    left = constants[spec.label_at(1, 0)][0] * constants[spec.label_at(1, 1)][0]
    return abs(right) <= tol * scale ** 2 and abs(left) <= tol * scale ** 2


# singular basis

@dataclass(frozen=True)
class XiBasis:
    """(dist)^{o(k)} / (m^2 k!), times -log(dist) when k = m-2 mod m, on one interval."""

    m: int
    k: int
    left: float
    right: float
    side: str
    eps: float | None = None

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise DomainError("side must be 'left' or 'right'")
        if self.k < 0:
            raise DomainError("k must be >= 0")

    @property
    def n(self) -> int:
        return math.ceil(grading.order(self.m, self.k))

    @property
    def a(self) -> float:
        return float(self.n - grading.order(self.m, self.k))

    @property
    def has_log(self) -> bool:
        return is_log_index(self.m, self.k)

    def local(self, dl, dr, order: int = 0):
        """D^order in the interval coordinate, from endpoint distances."""
        dist = np.asarray(dl if self.side == "left" else dr, dtype=float)
        sign = 1.0 if self.side == "left" else (-1.0) ** order
        norm = self.m ** 2 * math.factorial(self.k)
        vals = np.array([singular_term(self.m, self.k, float(t), order) for t in np.ravel(dist)])
        return sign * vals.reshape(dist.shape) / norm

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.left) & (x < self.right)
        out = np.zeros_like(x)
        if np.any(inside):
            xi = x[inside]
            out[inside] = self.local(xi - self.left, self.right - xi)
        return out[()] if out.ndim == 0 else out


def xi_basis(m: int, k: int, interval: tuple, side: str, eps: float | None = None) -> XiBasis:
    l, r = (float(v) for v in interval)
    if not l < r:
        raise DomainError("interval must have positive length")
    return XiBasis(m, k, l, r, side, eps)


# pointwise bounds from the norm

def hold_bound(samples: PiecewiseSamples, a: float) -> list[tuple[float, float]]:
    """(|phi(x)|, bound(x)) at every grid point for phi in C^{0+P_a}."""
    total = float(samples.spec.total_length())
    l1 = l1_norm(samples, 0)
    pa = p_a_seminorm(samples, a, 0)
    out = []
    for s in samples.labels.values():
        dmin = np.minimum(s.dl, s.dr)
        if a == 0:
            extra = np.log(s.length / (2 * dmin)) + 2
        else:
            extra = 1 / (a * dmin ** a) + 2 ** (a + 2) / (a * (1 - a) * s.length ** a)
        bound = l1 / total + pa * extra
        out.extend(zip(np.abs(s.derivs[0]).tolist(), bound.tolist()))
    return out


def filtration_bound(samples: PiecewiseSamples, a: float, b: float, side: str, label,
                     eps: float) -> tuple[float, float]:
    """(p_b(phi, J), ||phi'||_{L1(J)} + p_a(phi', J)/(1-a)) on an endpoint window J."""
    lhs = p_a_window(samples, b, 0, side, label, eps)
    rhs = l1_norm(samples, 1, (side, label, eps)) + p_a_window(samples, a, 1, side, label, eps) / (1 - a)
    return lhs, rhs
