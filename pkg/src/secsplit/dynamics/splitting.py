"""Measured splitting of the separatrix and the transversality certificate.

Both lower-lobe branches are flowed to a transversal line through the
circular orbit (by default ``xi = 0``).  The first crossing deep inside the
lobe gives, for every node, the angle ``gamma``, the depth along the line
and ``Gamma``.  Interpolating in the node index yields the two traces as
functions of ``gamma``; their difference is the splitting

    d(gamma)       = depth_u - depth_s
    d_Gamma(gamma) = Gamma_u - Gamma_s  ~  -mu * dL/dgamma.

Zeros of ``d`` mark transverse homoclinic intersections; ``zeros`` holds
the zeros of ``d_Gamma`` with slopes, ``d_zeros`` those of ``d``.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..core import derive_separatrix_constants
from ..errors import DomainError, ResolutionError
from ..melnikov import _angle_dist, closed_form_lplus
from ..separatrix import separatrix_sample
from .integrator import Event, IntegratorConfig
from .manifolds import TrigInterpolant, escape_time, flow_branch, solve_section_index
from .section import Section, find_fixed_point

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Transversal:
    """Line ``xi cos(phi) + eta sin(phi) = 0``; depth is measured along it.

    Only crossings with depth below half the unperturbed separatrix depth
    count, which excludes crossings near the periodic orbit.
    """

    phi: float = 0.0

    def __post_init__(self):
        if not abs(self.phi) < math.pi / 4.0:
            raise DomainError("transversal angle must satisfy |phi| < pi/4")

    def value(self, y):
        return y[0] * math.cos(self.phi) + y[1] * math.sin(self.phi)

    def depth(self, y):
        return -y[0] * math.sin(self.phi) + y[1] * math.cos(self.phi)

    def separatrix_depth(self, p):
        c = derive_separatrix_constants(p)
        f = lambda t: self.value(_sep_state(p, t))
        t = brentq(f, -2.0 / c.A2, 2.0 / c.A2, xtol=1e-14)
        return self.depth(_sep_state(p, t))


def _sep_state(p, t):
    s = separatrix_sample(np.array([t]), 0.0, p)
    return np.array([s.xi[0], s.eta[0]])


@dataclass
class BranchTrace:
    """Crossings of one branch with the transversal, one per node."""

    branch: str
    gamma: np.ndarray
    depth: np.ndarray
    Gamma: np.ndarray
    time: np.ndarray
    theta0: float
    dtheta: float

    def __post_init__(self):
        M = len(self.gamma)
        thetas = self.theta0 - self.dtheta * np.arange(M)
        self._delta = TrigInterpolant(self.gamma - thetas)
        self._data = TrigInterpolant(np.c_[self.depth, self.Gamma])

    def at(self, g):
        """``(depth, Gamma)`` of the trace at angle ``g``."""
        s = solve_section_index(self.theta0, self.dtheta, self._delta, g, len(self.gamma))
        d, G = self._data(s)[0]
        return d, G


def trace_branch(fp, p, branch, transversal=None, s0=1e-6, config=None):
    """Integrate the node seeds of ``branch`` to their deep crossing of the transversal."""
    tv = transversal or Transversal()
    thr = 0.5 * tv.separatrix_depth(p)
    c = derive_separatrix_constants(p)
    t_end = escape_time(p, s0 * p.L1) + 3.0 / c.A2
    ev = Event("transversal", lambda t, y: tv.value(y))
    flow = flow_branch(fp, branch, p, s0=s0, t_end=t_end, config=config, events=[ev], dense=False)
    rows = []
    for k, tr in enumerate(flow.trajectories):
        deep = [h for h in tr.hits("transversal") if tv.depth(h.y) < thr]
        if not deep:
            raise ResolutionError(
                f"{branch} node {k} did not reach the transversal",
                hint="increase the integration horizon or check mu")
        h = deep[0]
        rows.append((h.y[2], tv.depth(h.y), h.y[3], h.t))
    a = np.array(rows)
    return BranchTrace(branch, a[:, 0], a[:, 1], a[:, 2], a[:, 3],
                       float(fp.sections[0]), TWO_PI / fp.n_legs)


@dataclass
class SplittingZero:
    gamma: float
    slope: float
    slope_Gamma: float
    predicted: float
    offset: float


@dataclass
class SplittingResult:
    """Splitting measured at one value of ``mu``."""

    mu: float
    gamma: np.ndarray
    d: np.ndarray
    d_Gamma: np.ndarray
    predicted_d_Gamma: np.ndarray
    zeros: list
    d_zeros: list
    max_abs_d: float
    max_abs_d_Gamma: float
    amplitude_ratio: float
    fixed_point_offset: float
    log_lambda_u: float
    determinant: float
    return_time: float


@dataclass
class Certificate:
    mu: float
    verdict: str
    margin: float
    threshold: float
    reason: str


@dataclass
class SplittingReport:
    L1: float
    Gamma: float
    L_plus: complex
    transversal_phi: float
    results: list
    slope: float = math.nan
    slope_r2: float = math.nan
    certificates: list = field(default_factory=list)

    def to_dict(self):
        out = {
            "L1": self.L1, "Gamma": self.Gamma,
            "L_plus": [self.L_plus.real, self.L_plus.imag],
            "transversal_phi": self.transversal_phi,
            "slope": self.slope, "slope_r2": self.slope_r2,
            "results": [], "certificates": [asdict(c) for c in self.certificates],
        }
        for r in self.results:
            out["results"].append({
                "mu": r.mu, "max_abs_d": r.max_abs_d, "max_abs_d_Gamma": r.max_abs_d_Gamma,
                "amplitude_ratio": r.amplitude_ratio,
                "fixed_point_offset": r.fixed_point_offset,
                "log_lambda_u": r.log_lambda_u, "determinant": r.determinant,
                "return_time": r.return_time,
                "zeros": [asdict(z) for z in r.zeros],
                "d_zeros": list(r.d_zeros),
            })
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _zeros(fun, grid, vals):
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(brentq(fun, a, b, xtol=1e-13))
    return roots


def splitting_at(p, mu, gamma_ref=0.0, n_legs=32, s0=1e-6, n_grid=256, transversal=None,
                 config=None, L_plus=None, fp=None):
    """Measure the splitting at one ``mu``; see :class:`SplittingResult`."""
    cfg = config or IntegratorConfig()
    tv = transversal or Transversal()
    Lp = closed_form_lplus(p) if L_plus is None else L_plus
    if fp is None:
        fp = find_fixed_point(Section(p, gamma_ref), mu, cfg, n_legs=n_legs)
    up = trace_branch(fp, p, "unstable", tv, s0, cfg)
    st = trace_branch(fp, p, "stable", tv, s0, cfg)

    def diff(g):
        du, Gu = up.at(g)
        ds, Gs = st.at(g)
        return du - ds, Gu - Gs

    grid = np.linspace(0.0, TWO_PI, n_grid + 1)
    vals = np.array([diff(g) for g in grid])
    d, dG = vals[:, 0], vals[:, 1]
    h = 1e-6
    L_prime = lambda g: float(np.real(1j * Lp * np.exp(1j * g))) * 2.0
    pred = np.array([-mu * L_prime(g) for g in grid])
    zeros, d_zeros = [], []
    if mu > 0.0:
        d_zeros = [z % TWO_PI for z in _zeros(lambda g: diff(g)[0], grid, d)]
        phase = -math.atan2(Lp.imag, Lp.real)
        for z in _zeros(lambda g: diff(g)[1], grid, dG):
            z = z % TWO_PI
            dp, dm = diff(z + h), diff(z - h)
            cands = [(phase + k * math.pi) % TWO_PI for k in range(2)]
            pz = min(cands, key=lambda x: _angle_dist(x, z))
            zeros.append(SplittingZero(z, (dp[0] - dm[0]) / (2 * h), (dp[1] - dm[1]) / (2 * h),
                                       pz, _angle_dist(pz, z)))
    amp_pred = 2.0 * mu * abs(Lp)
    return SplittingResult(
        mu=float(mu), gamma=grid, d=d, d_Gamma=dG, predicted_d_Gamma=pred, zeros=zeros,
        d_zeros=d_zeros,
        max_abs_d=float(np.max(np.abs(d))), max_abs_d_Gamma=float(np.max(np.abs(dG))),
        amplitude_ratio=float(np.max(np.abs(dG)) / amp_pred) if amp_pred > 0 else math.nan,
        fixed_point_offset=float(np.max(np.hypot(*fp.points.T))),
        log_lambda_u=fp.log_lambda_u, determinant=fp.determinant, return_time=fp.return_time,
    )


def transversality_certificate(result, L_plus, threshold=0.1, noise_floor=1e-9):
    """Grant a certificate when every zero of ``d_Gamma`` is non-degenerate.

    The margin is ``min |d_Gamma'(z)| / (2 mu |Lplus|)``; the prediction is
    ``|d_Gamma'| = mu |L''| = 2 mu |Lplus|`` at a critical point.  Every
    other outcome (``mu = 0``, splitting below ``noise_floor``, fewer than
    two zeros, margin under ``threshold``) is ``inconclusive``, never a
    negative verdict.
    """
    mu = result.mu
    if mu == 0.0:
        return Certificate(mu, "inconclusive", math.nan, threshold, "mu = 0")
    if result.max_abs_d_Gamma < noise_floor:
        return Certificate(mu, "inconclusive", math.nan, threshold,
                           f"splitting {result.max_abs_d_Gamma:.2e} below noise floor")
    if len(result.zeros) < 2:
        return Certificate(mu, "inconclusive", 0.0, threshold, "fewer than two zeros found")
    ref = 2.0 * mu * abs(L_plus)
    margin = min(abs(z.slope_Gamma) for z in result.zeros) / ref
    ok = margin > threshold
    return Certificate(mu, "granted" if ok else "inconclusive", margin, threshold,
                       "all zeros transverse" if ok else "a zero is nearly degenerate")


def _fit_slope(mus, amps):
    x, y = np.log(mus), np.log(amps)
    A = np.c_[x, np.ones_like(x)]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - fit) ** 2)) / ss if ss > 0 else math.nan
    return float(coef[0]), r2


def _splitting_job(args):
    return splitting_at(*args)


def measure_splitting(p, mu_values, gamma_ref=0.0, n_legs=32, s0=1e-6, n_grid=256,
                      transversal=None, config=None, threshold=0.1, noise_floor=1e-9, jobs=1):
    """Splitting over a range of ``mu``, with log-log slope and certificates.

    Each ``mu`` is an independent job; results keep the order of ``mu_values``.
    """
    tv = transversal or Transversal()
    cfg = config or IntegratorConfig()
    Lp = closed_form_lplus(p)
    tasks = [(p, mu, gamma_ref, n_legs, s0, n_grid, tv, cfg, Lp) for mu in mu_values]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_splitting_job, tasks))
    else:
        results = []
        for t in tasks:
            log.info("measuring splitting at mu=%g", t[1])
            results.append(_splitting_job(t))
    certs = [transversality_certificate(r, Lp, threshold, noise_floor) for r in results]
    rep = SplittingReport(p.L1, p.Gamma, Lp, tv.phi, results, certificates=certs)
    pos = [(r.mu, r.max_abs_d) for r in results if r.mu > 0.0 and r.max_abs_d > noise_floor]
    if len(pos) >= 2:
        rep.slope, rep.slope_r2 = _fit_slope(*map(np.array, zip(*pos)))
    return rep
