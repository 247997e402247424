"""Flow of ``H0 + mu H2`` with automatic chart switching.

Trajectories are integrated in the Poincare chart near the circular orbit
(``G1/L1 > chart_switch``) and in the Delaunay chart elsewhere.  The switch
back to the Poincare chart happens at the midpoint of ``(chart_switch, 1)``
so the two switching surfaces never coincide.  All reported states are in
Poincare coordinates ``(xi, eta, gamma, Gamma)``; ``gamma`` is never
reduced modulo ``2 pi``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from ..core import DelaunayState, PoincareState
from ..errors import ChartDomainError, DomainError, MaxStepsExceeded, StepFailure
from ..hamiltonians import delaunay_energy, delaunay_rhs, poincare_energy, poincare_rhs

log = logging.getLogger(__name__)

METHODS = ("dop853", "gauss4")


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings.

    ``method`` is ``"dop853"`` (adaptive, default) or ``"gauss4"`` (fixed
    step, symplectic two-stage Gauss-Legendre).  ``energy_drift_budget`` is
    the tolerated ``|H(t) - H(0)|`` per unit time, relative to
    ``max(|H(0)|, 1e-3)``; it is reported, never enforced silently.
    """

    method: str = "dop853"
    rtol: float = 1e-12
    atol: float = 1e-14
    step: float = 1e-3
    chart_switch: float = 0.99
    max_steps: int = 500_000
    energy_drift_budget: float = 1e-10
    collision_guard: float = 1e-6

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown integrator method {self.method!r}")
        if not (self.rtol > 0 and self.atol > 0 and self.step > 0):
            raise DomainError("tolerances and step must be positive")
        if not (0.0 <= self.chart_switch < 1.0):
            raise DomainError("chart_switch must lie in [0, 1)")
        if self.max_steps < 1:
            raise DomainError("max_steps must be positive")

    @property
    def switch_back(self):
        return 0.5 * (1.0 + self.chart_switch)


@dataclass(frozen=True)
class Event:
    """Scalar function ``f(t, y)`` of the Poincare state whose zeros are recorded."""

    name: str
    func: Callable
    terminal: bool = False
    direction: float = 0.0


@dataclass(frozen=True)
class EventHit:
    name: str
    t: float
    y: np.ndarray


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    chart: np.ndarray
    energy: np.ndarray
    events: list
    segments: list = field(default_factory=list)
    steps: int = 0
    L1: float = 1.0

    @property
    def final(self):
        return self.y[-1]

    def hits(self, name):
        return [h for h in self.events if h.name == name]

    @property
    def energy_drift(self):
        return float(np.max(np.abs(self.energy - self.energy[0])))

    @property
    def drift_rate(self):
        span = abs(self.t[-1] - self.t[0])
        return self.energy_drift / span if span > 0 else 0.0

    def sol(self, t):
        """Dense output in Poincare coordinates (requires ``dense=True``)."""
        t = float(t)
        for t0, t1, chart, interp in self.segments:
            lo, hi = min(t0, t1), max(t0, t1)
            if lo - 1e-12 <= t <= hi + 1e-12:
                y = np.asarray(interp(t), dtype=float)
                return y if chart == "P" else _d2p(y, self.L1)
        raise ValueError(f"t={t!r} outside the integrated interval")


# ---------------------------------------------------------------- chart helpers

def _p2d(y, L):
    xi, eta = y[0], y[1]
    r2 = xi * xi + eta * eta
    if r2 <= 0.0:
        raise ChartDomainError("Delaunay chart undefined at the circular orbit")
    return np.array([math.atan2(-eta, xi), L - 0.5 * r2, y[2], y[3]])


def _d2p(y, L):
    r = math.sqrt(max(2.0 * (L - y[1]), 0.0))
    return np.array([r * math.cos(y[0]), -r * math.sin(y[0]), y[2], y[3]])


def _G_over_L(y, chart, L):
    if chart == "P":
        return 1.0 - 0.5 * (y[0] * y[0] + y[1] * y[1]) / L
    return y[1] / L


def _initial(state, L):
    if isinstance(state, PoincareState):
        return np.array([state.xi, state.eta, state.gamma, state.Gamma], dtype=float)
    if isinstance(state, DelaunayState):
        return _d2p([state.g1, state.G1, state.gamma, state.Gamma], L)
    y = np.asarray(state, dtype=float)
    if y.shape != (4,):
        raise DomainError("state must be a PoincareState, DelaunayState or a 4-vector")
    return y.copy()


def _to_chart(yP, chart, L):
    return yP.copy() if chart == "P" else _p2d(yP, L)


def _functions(chart, mu, L, A):
    if chart == "P":
        return (lambda t, y: poincare_rhs(y, mu, L, A)), (lambda y: poincare_energy(y, mu, L, A))
    return (lambda t, y: delaunay_rhs(y, mu, L, A)), (lambda y: delaunay_energy(y, mu, L, A))


# ---------------------------------------------------------------- main entry

def integrate(state, t_span, mu, p, config=None, events=(), dense=False):
    """Integrate ``H0 + mu H2`` from ``state`` over ``t_span`` (either direction).

    Returns a :class:`Trajectory` in Poincare coordinates with the energy at
    every output point and all event crossings.  Raises
    :class:`StepFailure`, :class:`ChartDomainError` or
    :class:`MaxStepsExceeded` on the corresponding failures.
    """
    cfg = config or IntegratorConfig()
    if mu < 0.0:
        raise DomainError("mu must be non-negative")
    L = p.L1
    yP = _initial(state, L)
    if not (yP[0] ** 2 + yP[1] ** 2 < 2.0 * L):
        raise ChartDomainError("initial state outside the chart domain (G1 <= 0)")
    chart = "P" if _G_over_L(yP, "P", L) > cfg.chart_switch else "D"
    if cfg.method == "dop853":
        return _integrate_dop853(yP, chart, t_span, mu, p, cfg, events, dense)
    return _integrate_gauss4(yP, chart, t_span, mu, p, cfg, events, dense)


def _wrap_event(ev, chart, L):
    if chart == "P":
        f = lambda t, y: ev.func(t, y)
    else:
        f = lambda t, y: ev.func(t, _d2p(y, L))
    f.terminal = ev.terminal
    f.direction = ev.direction
    return f


def _switch_event(chart, cfg, L):
    if chart == "P":
        f = lambda t, y: 1.0 - 0.5 * (y[0] * y[0] + y[1] * y[1]) / L - cfg.chart_switch
        f.direction = -1.0
    else:
        f = lambda t, y: y[1] / L - cfg.switch_back
        f.direction = 1.0
    f.terminal = True
    return f


def _collision_event(cfg, L):
    f = lambda t, y: y[1] / L - cfg.collision_guard
    f.terminal = True
    f.direction = -1.0
    return f


def _integrate_dop853(yP, chart, t_span, mu, p, cfg, events, dense):
    L, A = p.L1, p.A_oct
    t, t_end = float(t_span[0]), float(t_span[1])
    ts, ys, charts, energies, hits, segments = [], [], [], [], [], []
    steps = 0
    y = _to_chart(yP, chart, L)
    while True:
        rhs, energy = _functions(chart, mu, L, A)
        evs = [_switch_event(chart, cfg, L)]
        if chart == "D":
            evs.append(_collision_event(cfg, L))
        n_internal = len(evs)
        evs += [_wrap_event(ev, chart, L) for ev in events]
        if t == t_end:
            sol_t, sol_y, status, t_events, y_events, interp = np.array([t]), y[:, None], 0, [[]] * len(evs), [[]] * len(evs), None
        else:
            sol = solve_ivp(rhs, (t, t_end), y, method="DOP853", rtol=cfg.rtol,
                            atol=cfg.atol, events=evs, dense_output=dense)
            if sol.status == -1:
                raise StepFailure(f"integration failed at t={sol.t[-1]!r}: {sol.message}")
            sol_t, sol_y, status = sol.t, sol.y, sol.status
            t_events, y_events, interp = sol.t_events, sol.y_events, sol.sol
        steps += len(sol_t)
        if steps > cfg.max_steps:
            raise MaxStepsExceeded(f"more than {cfg.max_steps} steps")
        start = 1 if ts else 0
        for j in range(start, len(sol_t)):
            yj = sol_y[:, j]
            ts.append(sol_t[j])
            ys.append(yj if chart == "P" else _d2p(yj, L))
            charts.append(chart)
            energies.append(energy(yj))
        if dense and interp is not None:
            segments.append((sol_t[0], sol_t[-1], chart, interp))
        for i, ev in enumerate(events):
            for te, ye in zip(t_events[n_internal + i], y_events[n_internal + i]):
                ye = np.asarray(ye)
                hits.append(EventHit(ev.name, float(te), ye if chart == "P" else _d2p(ye, L)))
        if status != 1:
            break
        t = float(sol_t[-1])
        y_last = sol_y[:, -1]
        if len(t_events[0]) and t_events[0][-1] == t:
            yP_last = y_last if chart == "P" else _d2p(y_last, L)
            chart = "D" if chart == "P" else "P"
            y = _to_chart(yP_last, chart, L)
            log.debug("chart switch to %s at t=%.6g", chart, t)
            continue
        if chart == "D" and len(t_events[1]) and t_events[1][-1] == t:
            raise ChartDomainError(f"G1 approached 0 at t={t!r}")
        break  # user terminal event
    return Trajectory(np.array(ts), np.array(ys), np.array(charts), np.array(energies),
                      hits, segments, steps, L)


# ---------------------------------------------------------------- Gauss-Legendre

_S3 = math.sqrt(3.0)
_GL_A = np.array([[0.25, 0.25 - _S3 / 6.0], [0.25 + _S3 / 6.0, 0.25]])


def _gl4_step(f, t, y, h, tol=1e-15, max_iter=60):
    k1 = k2 = np.asarray(f(t, y), dtype=float)
    c1, c2 = 0.5 - _S3 / 6.0, 0.5 + _S3 / 6.0
    for _ in range(max_iter):
        n1 = np.asarray(f(t + c1 * h, y + h * (_GL_A[0, 0] * k1 + _GL_A[0, 1] * k2)), dtype=float)
        n2 = np.asarray(f(t + c2 * h, y + h * (_GL_A[1, 0] * k1 + _GL_A[1, 1] * k2)), dtype=float)
        delta = max(np.max(np.abs(n1 - k1)), np.max(np.abs(n2 - k2)))
        k1, k2 = n1, n2
        if delta * abs(h) <= tol * (1.0 + np.max(np.abs(y))):
            return y + 0.5 * h * (k1 + k2)
    raise StepFailure(f"implicit stage iteration did not converge at t={t!r}")


def _integrate_gauss4(yP, chart, t_span, mu, p, cfg, events, dense):
    L, A = p.L1, p.A_oct
    t, t_end = float(t_span[0]), float(t_span[1])
    sgn = 1.0 if t_end >= t else -1.0
    y = _to_chart(yP, chart, L)
    rhs, energy = _functions(chart, mu, L, A)
    ts, ys, charts, energies, hits = [t], [yP.copy()], [chart], [energy(y)], []
    seg_t, seg_y, seg_f, segments = [t], [y.copy()], [np.asarray(rhs(t, y))], []
    ev_prev = [ev.func(t, yP) for ev in events]
    steps = 0
    stop = False

    def close_segment():
        if dense and len(seg_t) > 1:
            order = np.argsort(seg_t)
            tt = np.array(seg_t)[order]
            segments.append((seg_t[0], seg_t[-1], chart,
                             CubicHermiteSpline(tt, np.array(seg_y)[order], np.array(seg_f)[order])))

    while sgn * (t_end - t) > 0.0 and not stop:
        h = sgn * min(cfg.step, abs(t_end - t))
        y_new = _gl4_step(rhs, t, y, h)
        t_new = t + h
        steps += 1
        if steps > cfg.max_steps:
            raise MaxStepsExceeded(f"more than {cfg.max_steps} steps")
        f_old, f_new = np.asarray(rhs(t, y)), np.asarray(rhs(t_new, y_new))
        if chart == "D" and y_new[1] / L < cfg.collision_guard:
            raise ChartDomainError(f"G1 approached 0 at t={t_new!r}")
        yP_new = y_new if chart == "P" else _d2p(y_new, L)
        herm = CubicHermiteSpline([min(t, t_new), max(t, t_new)],
                                  np.array([y, y_new] if h > 0 else [y_new, y]),
                                  np.array([f_old, f_new] if h > 0 else [f_new, f_old]))
        for i, ev in enumerate(events):
            v_new = ev.func(t_new, yP_new)
            v_old = ev_prev[i]
            crossed = (v_old < 0.0 <= v_new and ev.direction >= 0) or \
                      (v_old > 0.0 >= v_new and ev.direction <= 0)
            if crossed:
                to_p = (lambda s: herm(s)) if chart == "P" else (lambda s: _d2p(herm(s), L))
                te = brentq(lambda s: ev.func(s, to_p(s)), min(t, t_new), max(t, t_new), xtol=1e-15)
                hits.append(EventHit(ev.name, te, to_p(te)))
                if ev.terminal:
                    t_new, y_new = te, np.asarray(herm(te))
                    yP_new = y_new if chart == "P" else _d2p(y_new, L)
                    stop = True
            ev_prev[i] = v_new
        t, y = t_new, y_new
        ts.append(t)
        ys.append(yP_new)
        charts.append(chart)
        energies.append(energy(y))
        seg_t.append(t)
        seg_y.append(y.copy())
        seg_f.append(np.asarray(rhs(t, y)))
        gl = _G_over_L(y, chart, L)
        if (chart == "P" and gl < cfg.chart_switch) or (chart == "D" and gl > cfg.switch_back):
            close_segment()
            chart = "D" if chart == "P" else "P"
            y = _to_chart(yP_new, chart, L)
            rhs, energy = _functions(chart, mu, L, A)
            seg_t, seg_y, seg_f = [t], [y.copy()], [np.asarray(rhs(t, y))]
    close_segment()
    return Trajectory(np.array(ts), np.array(ys), np.array(charts), np.array(energies),
                      hits, segments, steps, L)
