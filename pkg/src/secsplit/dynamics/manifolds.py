"""Stable and unstable manifolds of the hyperbolic periodic orbit.

Each node of a :class:`FixedPoint` is displaced by ``s0`` along its
stable or unstable direction (towards the lower lobe, ``eta < 0``) and
flowed forward (unstable) or backward (stable) with dense output.  Because
the nodes are equally spaced in the section angle, any quantity carried by
the node trajectories is a smooth periodic function of the node index and
is interpolated trigonometrically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..core import derive_separatrix_constants
from ..errors import DomainError, ResolutionError
from ..separatrix import separatrix_sample
from .integrator import IntegratorConfig, integrate

log = logging.getLogger(__name__)

BRANCHES = ("unstable", "stable")


class TrigInterpolant:
    """Trigonometric interpolant of samples at ``s = 0, 1, ..., M-1`` (period ``M``)."""

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        self.M = v.shape[0]
        self._coef = np.fft.fft(v, axis=0) / self.M
        k = np.fft.fftfreq(self.M, d=1.0 / self.M)
        if self.M % 2 == 0:
            k[self.M // 2] = 0.0  # Nyquist term: keep it real and symmetric
            self._nyq = self._coef[self.M // 2].copy()
        else:
            self._nyq = None
        self._k = k

    def __call__(self, s, derivative=0):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        phase = np.exp(2j * np.pi * np.outer(s, self._k) / self.M)
        w = (2j * np.pi * self._k / self.M) ** derivative
        coef = self._coef * (w.reshape(-1, *([1] * (self._coef.ndim - 1))))
        if self._nyq is not None:
            coef = coef.copy()
            coef[self.M // 2] = 0.0
        out = (phase @ coef.reshape(self.M, -1)).real
        if self._nyq is not None:
            arg = np.pi * s
            term = np.cos(arg) if derivative % 2 == 0 else np.sin(arg)
            sign = (-1.0) ** ((derivative + 1) // 2)
            out = out + sign * (np.pi ** derivative) * np.outer(term, self._nyq.real.reshape(-1))
        return out.reshape(s.shape + self._coef.shape[1:])


def seed_offsets(fp, branch, s0):
    """Node seeds ``x_k + s0 * sigma * v_k`` on the lower-lobe side (``eta`` decreasing)."""
    if branch not in BRANCHES:
        raise DomainError(f"branch must be one of {BRANCHES}")
    v = fp.v_u if branch == "unstable" else fp.v_s
    sigma = np.where(v[:, 1] < 0.0, 1.0, -1.0)[:, None]
    return fp.points + s0 * sigma * v


def escape_time(p, s0):
    """Unperturbed flow time from distance ``s0`` of the circular orbit to ``xi = 0``."""
    c = derive_separatrix_constants(p)

    def f(t):
        smp = separatrix_sample(np.array([t]), 0.0, p)
        return math.log(math.hypot(smp.xi[0], smp.eta[0])) - math.log(s0)

    hi = 0.0
    lo = -1.0 / c.A2
    while f(lo) > 0.0:
        lo *= 2.0
        if lo < -1e4 / c.A2:
            raise DomainError("s0 too small for the escape-time estimate")
    return -brentq(f, lo, hi, xtol=1e-12)


@dataclass
class BranchFlow:
    """Dense node trajectories of one manifold branch."""

    branch: str
    fp: object
    s0: float
    t_end: float
    trajectories: list

    @property
    def sign(self):
        return 1.0 if self.branch == "unstable" else -1.0

    def states(self, T):
        """Poincare states of all node trajectories at flow time ``T`` (shape ``(M, 4)``)."""
        return np.array([tr.sol(T) for tr in self.trajectories])


def flow_branch(fp, branch, p, s0=1e-6, t_end=None, config=None, events=(), dense=True):
    """Integrate every node seed of ``branch`` over ``[0, t_end]`` (backwards for stable)."""
    cfg = config or IntegratorConfig()
    s0 = s0 * p.L1
    if t_end is None:
        t_end = escape_time(p, s0) + 3.0 / derive_separatrix_constants(p).A2
    sign = 1.0 if branch == "unstable" else -1.0
    seeds = seed_offsets(fp, branch, s0)
    from .section import ReturnMap  # local import avoids a cycle

    rm = ReturnMap(fp.section, fp.mu, cfg)
    trajs = []
    for k, x in enumerate(seeds):
        G = rm.lift(x, fp.sections[k], fp.Gammas[k])
        y0 = np.array([x[0], x[1], fp.sections[k], G])
        trajs.append(integrate(y0, (0.0, sign * t_end), fp.mu, p, cfg, events=events, dense=dense))
    return BranchFlow(branch, fp, s0, t_end, trajs)


def solve_section_index(theta0, dtheta, delta, target, M):
    """Find ``s`` in ``[0, M)`` with ``theta0 - s*dtheta + delta(s) = target (mod 2 pi)``."""
    F = lambda s: theta0 - s * dtheta + float(delta(s)[0]) - target
    grid = np.linspace(0.0, M, 4 * M + 1)
    vals = np.array([F(s) for s in grid])
    m = math.floor(vals[0] / (2.0 * math.pi))
    g = vals - 2.0 * math.pi * m
    idx = np.nonzero((g[:-1] >= 0.0) & (g[1:] < 0.0))[0]
    if len(idx) == 0:
        raise ResolutionError("section angle not attained by the node family",
                              hint="increase n_legs")
    i = idx[0]
    return brentq(lambda s: F(s) - 2.0 * math.pi * m, grid[i], grid[i + 1], xtol=1e-14)


@dataclass
class ManifoldCurve:
    """Points of a manifold branch on the section ``gamma = gamma_section``.

    ``times`` are the flow times from the seeds (negative for the stable
    branch); ``points`` are ``(xi, eta)`` and ``Gammas`` the conjugate actions.
    """

    branch: str
    gamma_section: float
    times: np.ndarray
    points: np.ndarray
    Gammas: np.ndarray
    mu: float

    @property
    def length(self):
        return float(np.sum(np.hypot(*np.diff(self.points, axis=0).T)))


def _curve_point(flow, T, gamma_section):
    fp = flow.fp
    M = fp.n_legs
    Y = flow.states(T)
    dtheta = 2.0 * math.pi / M
    delta = TrigInterpolant(Y[:, 2] - fp.sections)
    data = TrigInterpolant(Y[:, [0, 1, 3]])
    s = solve_section_index(fp.sections[0], dtheta, delta, gamma_section, M)
    xi, eta, G = data(s)[0]
    return np.array([xi, eta]), G


def grow_manifold(fp, p, branch="unstable", gamma_section=None, s0=1e-6, t_max=None,
                  resolution=0.02, n_initial=64, max_points=4000, config=None, flow=None):
    """Trace a manifold branch on a section by flow-time parameterization.

    The curve is sampled at flow times ``T`` in ``[0, t_max]``: for each
    ``T`` the node family at time ``T`` is intersected with the section by
    periodic interpolation.  Samples are refined until consecutive points
    are closer than ``resolution * L1``.
    """
    if gamma_section is None:
        gamma_section = fp.sections[0]
    if flow is None:
        flow = flow_branch(fp, branch, p, s0=s0, t_end=t_max, config=config)
    sign = flow.sign
    T_all = list(np.linspace(0.0, flow.t_end, n_initial))
    pts = {T: _curve_point(flow, sign * T, gamma_section) for T in T_all}
    tol = resolution * p.L1
    changed = True
    while changed:
        changed = False
        Ts = sorted(pts)
        for a, b in zip(Ts[:-1], Ts[1:]):
            if len(pts) >= max_points:
                log.warning("grow_manifold stopped at max_points=%d", max_points)
                break
            if np.hypot(*(pts[b][0] - pts[a][0])) > tol and b - a > 1e-9:
                m = 0.5 * (a + b)
                pts[m] = _curve_point(flow, sign * m, gamma_section)
                changed = True
    Ts = np.array(sorted(pts))
    return ManifoldCurve(branch, float(gamma_section), sign * Ts,
                         np.array([pts[T][0] for T in Ts]),
                         np.array([pts[T][1] for T in Ts]), fp.mu)
