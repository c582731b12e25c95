"""Direct integration of dz/dt = m conj(z)^{m-1} / V near a perfect saddle.

Orbits enter the branch-l sector at G_l(-eps - i s) and leave where
Re z^m = eps. Along the way H = Im z^m is conserved, which gives a cheap
accuracy check independent of the integrator's own error estimate.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DensityVanishesError, DomainError, NoExitError
from .jets import ComplexJet, SaddleModel, jet_eval
from .quadrature import QuadSpec
from .sector_integrals import gtype_combo, root_branch

RTOL = 1e-11
ATOL = 1e-13


def _scalar_eval(jet: ComplexJet | None):
    if jet is None:
        return lambda z: 1.0
    terms = list(jet.terms)

    def ev(z: complex) -> complex:
        zb = z.conjugate()
        return sum(c * z ** i * zb ** j for i, j, c in terms)

    return ev


def _density(saddle: SaddleModel):
    ev = _scalar_eval(saddle.v_jet)

    def v(z: complex) -> float:
        val = ev(z).real
        if val <= 0:
            raise DensityVanishesError(f"density vanishes or turns negative at z = {z}")
        return val

    return v


def vector_field(saddle: SaddleModel, z: complex) -> complex:
    z = complex(z)
    return saddle.m * z.conjugate() ** (saddle.m - 1) / _density(saddle)(z)


def entry_point(saddle: SaddleModel, l: int, s: float) -> complex:
    return root_branch(saddle.m, l, complex(-saddle.epsilon, -s))


def exit_point(saddle: SaddleModel, l: int, s: float) -> complex:
    return root_branch(saddle.m, l, complex(saddle.epsilon, -s))


@dataclass
class OrbitSegment:
    times: np.ndarray
    points: np.ndarray
    hamiltonian_drift: float
    integral: complex = 0j

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re z", "im z"])
            for t, z in zip(self.times, self.points):
                w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])


@dataclass
class TransitResult:
    tau: float
    integral: complex
    orbit: OrbitSegment
    mode: str
    expected: complex | None = None

    @property
    def rel_err(self) -> float:
        if self.expected is None:
            return math.nan
        return abs(self.integral - self.expected) / max(abs(self.expected), 1e-300)


def _check_s(saddle: SaddleModel, s: float) -> None:
    if s == 0:
        raise DomainError("s = 0 enters the saddle; transit needs s != 0")
    if abs(s) > saddle.epsilon:
        raise DomainError("s must lie in [-eps, eps]")


def flow(saddle: SaddleModel, z0: complex, t_end: float, f: ComplexJet | None = None,
         rtol: float = RTOL, atol: float = ATOL, events=None, max_step: float = np.inf):
    """Integrate the flow (and the integral of f) from z0 over [0, t_end] (t_end may be negative)."""
    m = saddle.m
    dens = _density(saddle)
    fe = _scalar_eval(f)

    def rhs(t, y):
        z = complex(y[0], y[1])
        dz = m * z.conjugate() ** (m - 1) / dens(z)
        fz = fe(z)
        return [dz.real, dz.imag, fz.real, fz.imag]

    z0 = complex(z0)
    return solve_ivp(rhs, (0.0, t_end), [z0.real, z0.imag, 0.0, 0.0], method="RK45",
                     rtol=rtol, atol=atol, events=events, dense_output=False, max_step=max_step)


def _transit_time_mode(saddle, l, s, f, rtol, atol, t_max):
    m, eps = saddle.m, saddle.epsilon
    z0 = entry_point(saddle, l, s)

    def leave(t, y):
        return (complex(y[0], y[1]) ** m).real - eps

    leave.terminal = True
    leave.direction = 1
    sol = flow(saddle, z0, t_max, f, rtol, atol, events=[leave])
    if sol.status != 1 or not len(sol.t_events[0]):
        raise NoExitError(f"orbit did not leave the sector before t = {t_max}")
    ye = sol.y_events[0][0]
    pts = sol.y[0] + 1j * sol.y[1]
    pts = np.append(pts, ye[0] + 1j * ye[1])
    times = np.append(sol.t, sol.t_events[0][0])
    return float(times[-1]), complex(ye[2], ye[3]), times, pts


def _transit_chart_mode(saddle, l, s, f, rtol, atol, v_end=None):
    """Use v = Re z^m as the independent variable: dz/dv = 1/(m z^{m-1})."""
    m, eps = saddle.m, saddle.epsilon
    dens = _density(saddle)
    fe = _scalar_eval(f)
    z0 = entry_point(saddle, l, s)
    v_end = eps if v_end is None else v_end

    def rhs(v, y):
        z = complex(y[0], y[1])
        dz = 1.0 / (m * z ** (m - 1))
        dt = dens(z) / (m * m * abs(z) ** (2 * (m - 1)))
        fz = fe(z) * dt
        return [dz.real, dz.imag, dt, fz.real, fz.imag]

    # the peak near v = 0 has width |s|; keep steps below that scale there
    sol = solve_ivp(rhs, (-eps, v_end), [z0.real, z0.imag, 0.0, 0.0, 0.0], method="RK45",
                    rtol=rtol, atol=atol, max_step=max(abs(s), 1e-6) * 4)
    if sol.status != 0:
        raise NoExitError(sol.message)
    y = sol.y[:, -1]
    return float(y[2]), complex(y[3], y[4]), sol.y[2], sol.y[0] + 1j * sol.y[1]


def transit(saddle: SaddleModel, l: int, s: float, f: ComplexJet | None = None,
            mode: str = "auto", rtol: float = RTOL, atol: float = ATOL,
            t_max: float = 1e4) -> TransitResult:
    """Transit time tau_l(s) and the integral of f along the orbit through the sector.

    ``mode`` is "time" (integrate in t with an exit event), "chart" (integrate
    in v = Re z^m) or "auto", which picks the chart for |s| < eps/50.
    """
    if not 0 <= l < saddle.m:
        raise DomainError(f"branch index must lie in 0..{saddle.m - 1}")
    _check_s(saddle, s)
    if mode == "auto":
        mode = "chart" if abs(s) < saddle.epsilon / 50 else "time"
    if mode == "time":
        tau, integral, times, pts = _transit_time_mode(saddle, l, s, f, rtol, atol, t_max)
    elif mode == "chart":
        tau, integral, times, pts = _transit_chart_mode(saddle, l, s, f, rtol, atol)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    h0 = (pts[0] ** saddle.m).imag
    drift = float(np.max(np.abs((pts ** saddle.m).imag - h0)))
    orbit = OrbitSegment(np.asarray(times), pts, drift, integral)
    return TransitResult(tau, integral, orbit, mode)


def _rescaled(f: ComplexJet | None, saddle: SaddleModel):
    """w -> (f V)(eps^{1/m} w), evaluated without truncating the product."""
    c = saddle.epsilon ** (1.0 / saddle.m)
    v_jet = saddle.v_jet

    def g(w):
        w = np.asarray(w, dtype=complex) * c
        fv = np.ones_like(w) if f is None else jet_eval(f, w)
        return fv * jet_eval(v_jet, w)

    return g


def transit_expected(saddle: SaddleModel, l: int, s: float, f: ComplexJet | None = None,
                     u: float = 1.0, q: QuadSpec = QuadSpec()) -> complex:
    """eps^{-(m-2)/m}/m^2 times the sector integral of (f V) o eps^{1/m} up to u at height -s/eps."""
    m, eps = saddle.m, saddle.epsilon
    pref = eps ** (-(m - 2) / m) / m ** 2
    res = gtype_combo(_rescaled(f, saddle), m, l, {(0, 0, m - 1, m - 1): 1.0}, u, -s / eps, q)
    return pref * res.value


def transit_check(saddle: SaddleModel, l: int, s: float, f: ComplexJet | None = None,
                  mode: str = "auto", q: QuadSpec = QuadSpec()) -> TransitResult:
    res = transit(saddle, l, s, f, mode)
    res.expected = transit_expected(saddle, l, s, f, 1.0, q)
    return res


@dataclass
class InteriorReport:
    omega: complex
    s: float
    u: float
    ode_value: complex
    quad_value: complex
    time: float

    @property
    def rel_err(self) -> float:
        scale = max(abs(self.quad_value), 1e-300)
        return abs(self.ode_value - self.quad_value) / scale

    def to_json(self) -> dict:
        return {"omega": [self.omega.real, self.omega.imag], "s": self.s, "u": self.u,
                "ode": [self.ode_value.real, self.ode_value.imag],
                "quadrature": [self.quad_value.real, self.quad_value.imag], "rel_err": self.rel_err}


def interior_point_identity(saddle: SaddleModel, l: int, w: complex, f: ComplexJet | None = None,
                            q: QuadSpec = QuadSpec()) -> InteriorReport:
    """Partial transit from the entry curve to w, by ODE and by quadrature."""
    m, eps = saddle.m, saddle.epsilon
    w = complex(w)
    if w == 0:
        raise DomainError("w must differ from the vertex")
    z = w ** m
    u, s = z.real, -z.imag
    if not (-eps <= u <= eps and -eps <= s <= eps):
        raise DomainError("w lies outside the chart domain")
    if abs(root_branch(m, l, complex(u, -s)) - w) > 1e-9 * max(abs(w), 1.0):
        raise DomainError(f"w does not lie in the branch-{l} sector")
    if s == 0:
        raise DomainError("w on the incoming separatrix is reached only after infinite time")
    quad = transit_expected(saddle, l, s, f, u / eps, q) if u > -eps else 0j
    if u <= -eps:
        return InteriorReport(w, s, u, 0j, quad, 0.0)
    dens = _density(saddle)
    fe = _scalar_eval(f)
    z0 = entry_point(saddle, l, s)

    def rhs(v, y):
        zz = complex(y[0], y[1])
        dt = dens(zz) / (m * m * abs(zz) ** (2 * (m - 1)))
        dz = 1.0 / (m * zz ** (m - 1))
        fz = fe(zz) * dt
        return [dz.real, dz.imag, dt, fz.real, fz.imag]

    sol = solve_ivp(rhs, (-eps, u), [z0.real, z0.imag, 0.0, 0.0, 0.0], method="RK45",
                    rtol=RTOL, atol=ATOL, max_step=max(abs(s), 1e-6) * 4)
    y = sol.y[:, -1]
    return InteriorReport(w, s, u, complex(y[3], y[4]), quad, float(y[2]))


def time_reversal_error(saddle: SaddleModel, l: int, s: float) -> float:
    """Distance between the entry point and the backward image of the exit point."""
    res = transit(saddle, l, s, None, mode="time")
    z_exit = res.orbit.points[-1]
    back = flow(saddle, z_exit, -res.tau)
    z_back = complex(back.y[0, -1], back.y[1, -1])
    return abs(z_back - res.orbit.points[0])
