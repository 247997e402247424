"""Poincare-Melnikov potential of the octupolar perturbation.

Along the heteroclinic orbit ``Z0(t, gamma0)`` the perturbation has a single
harmonic in ``gamma``, so the potential reduces to one complex number::

    Lplus = int F+(t) exp(-i w t) dt,     w = 2 Gamma / L1^2
    L(gamma0) = Lplus e^{i gamma0} + conj(Lplus) e^{-i gamma0}

with ``F+ = H2+ e^{i gamma2} = (F1 + i F2)/2`` and ``Lplus = L1 + i L2``,
``Lj = (1/2) int Fj(t) exp(-i w t) dt``.

Two independent routes are provided:

* quadrature: ``H2`` evaluated numerically on the sampled orbit;
* residues: the closed forms ``F1 = C1t sinh(tau)/cosh(tau)^2`` and
  ``F2 = C2 ((5 chi^2 + 1)/cosh(tau) + 6/cosh(tau)^3)`` have poles only at
  ``tau = -i pi/2`` in the strip ``-pi < Im tau < 0``; shifting the
  contour by ``-i pi`` gives ``int f = -2 pi i sum(Res) / (1 + e^{-2 alpha})``.

The closed form is only trusted after it agrees with the quadrature; the
outcome of that reconciliation (which candidate survived) is recorded in
every :class:`MelnikovValue`.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .core import SQRT_3_5, SecularParams, derive_separatrix_constants
from .errors import DomainError, QuadratureError, ReconciliationError
from .hamiltonians import _h2_p, _h2_p_grad, h2_harmonics_poincare, octupole_constants

log = logging.getLogger(__name__)

CANONICAL_RATE = "2*Gamma/(A2*L1**2)"
ALTERNATE_RATE = "2*Gamma/A2**2"
CANONICAL_VARIANT = f"single-pole/{CANONICAL_RATE}"
DEFAULT_T_FACTOR = 40.0
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ResidueTerm:
    pole: complex
    residue: complex
    label: str


@dataclass
class MelnikovValue:
    """Complex harmonic of the potential with its provenance.

    ``L_plus`` is the reconciled closed form (or the quadrature value when
    residues are skipped).  ``variants`` maps every candidate closed form to
    its relative deviation from the quadrature; ``survivors`` lists those
    within tolerance.
    """

    L1: float
    Gamma: float
    L_plus: complex
    L1_part: complex
    L2_part: complex
    residue_terms: list = field(default_factory=list)
    quadrature_value: complex | None = None
    quadrature_error: float | None = None
    tail_bound: float | None = None
    parity_defect: float | None = None
    agreement: float | None = None
    variants: dict = field(default_factory=dict)
    survivors: list = field(default_factory=list)
    reconciled: bool | None = None

    @property
    def abs(self):
        return abs(self.L_plus)

    @property
    def arg(self):
        return cmath.phase(self.L_plus)


# ---------------------------------------------------------------- on-orbit forms

def _sep_constants(p):
    c = derive_separatrix_constants(p)
    return c, octupole_constants(p)


def f1_of_g1(g1, p):
    """``F1`` on the separatrix as a function of ``g1``."""
    c, oc = _sep_constants(p)
    cg = np.cos(g1)
    cg2 = cg * cg
    num = 1.0 - 5.0 / 3.0 * (1.0 + c.chi ** 2) * cg2
    if np.any(num < -1e-14):
        raise DomainError("g1 outside the separatrix range")
    return oc.C1_sep * cg * np.sqrt(np.maximum(num, 0.0)) / (1.0 - 5.0 / 3.0 * cg2)


def f2_of_g1(g1, p):
    """``F2`` on the separatrix as a function of ``g1``."""
    c, oc = _sep_constants(p)
    cg2 = np.cos(g1) ** 2
    num = 1.0 - 5.0 / 3.0 * (1.0 + c.chi ** 2) * cg2
    if np.any(num < -1e-14):
        raise DomainError("g1 outside the separatrix range")
    R = np.sqrt(np.maximum(num, 0.0) / (1.0 - 5.0 / 3.0 * cg2))
    return oc.C2_sep * ((5.0 * c.chi ** 2 + 1.0) * R + 6.0 * R ** 3)


def f1_of_tau(tau, p):
    """``F1`` on the separatrix as a function of ``tau = A2 t``."""
    _, oc = _sep_constants(p)
    tau = np.asarray(tau, dtype=float)
    sech = 1.0 / np.cosh(np.clip(tau, -700.0, 700.0))
    return oc.C1tilde_sep * np.tanh(tau) * sech


def f2_of_tau(tau, p):
    """``F2`` on the separatrix as a function of ``tau = A2 t``."""
    c, oc = _sep_constants(p)
    tau = np.asarray(tau, dtype=float)
    R = 1.0 / np.cosh(np.clip(tau, -700.0, 700.0))
    return oc.C2_sep * ((5.0 * c.chi ** 2 + 1.0) * R + 6.0 * R ** 3)


# ---------------------------------------------------------------- quadrature route

class _OrbitEvaluator:
    """Fast scalar evaluation of the perturbation along the heteroclinic orbit."""

    def __init__(self, p):
        c = derive_separatrix_constants(p)
        self.p = p
        self.L1, self.Gam = p.L1, p.Gamma
        self.A2, self.chi, self.q = c.A2, c.chi, c.q
        self.chi2 = c.chi * c.chi
        self.gh2 = c.GammaHat ** 2
        self.A_oct = p.A_oct
        self.w = 2.0 * p.Gamma / p.L1 ** 2

    def state(self, t):
        a = abs(self.A2 * t)
        ea = math.exp(-a)
        sech = 2.0 * ea / (1.0 + ea * ea)
        th = math.tanh(self.A2 * t)
        Dn = math.sqrt(self.chi2 * sech * sech + (1.0 + self.chi2) * th * th)
        cg = SQRT_3_5 * th / Dn
        sg = math.sqrt(self.chi2 * sech * sech + (0.4 + self.chi2) * th * th) / Dn
        W = math.sqrt(th * th + 5.0 / 3.0 * self.gh2 * sech * sech)
        rho = math.sqrt(2.0 * self.L1 * self.q * sech * sech / (1.0 + W))
        gamma2 = math.atan(th / self.chi)
        return rho * cg, -rho * sg, gamma2, sech

    def fplus(self, t):
        xi, eta, gamma2, _ = self.state(t)
        hp, _ = h2_harmonics_poincare(xi, eta, self.Gam, self.p)
        return hp * cmath.exp(1j * gamma2)

    def h2(self, t, gamma0):
        xi, eta, gamma2, _ = self.state(t)
        return _h2_p(xi, eta, gamma0 - self.w * t + gamma2, self.Gam, self.L1, self.A_oct)

    def h2_dgamma(self, t, gamma0):
        xi, eta, gamma2, _ = self.state(t)
        g = gamma0 - self.w * t + gamma2
        return _h2_p_grad(xi, eta, g, self.Gam, self.L1, self.A_oct)[3]


def _quad(f, a, b, scale, epsrel=1e-13):
    # near-zero integrals (e.g. L' at a critical point) cannot meet epsrel;
    # callers judge the returned error estimate instead of the warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, epsabs=1e-15 * scale, epsrel=epsrel, limit=400)
    return val, err


def melnikov_quadrature(p, T_factor=DEFAULT_T_FACTOR, max_error=1e-10):
    """``Lplus`` by adaptive quadrature of ``F+`` along the sampled orbit.

    The integral is truncated to ``|t| <= T = T_factor/A2``; the neglected
    tails are bounded by ``2 e^{-A2 T} sup|F+| / A2``.  The two half-lines
    are integrated separately so that the parity of ``F1`` (odd) and ``F2``
    (even) can be reported as ``parity_defect``.
    """
    ev = _OrbitEvaluator(p)
    T = T_factor / ev.A2
    w = ev.w
    scale = abs(p.A_oct) / ev.A2

    def comp(j, trig):
        if j == 1:
            g = lambda t: 2.0 * ev.fplus(t).real
        else:
            g = lambda t: 2.0 * ev.fplus(t).imag
        if trig == "cos":
            return lambda t: g(t) * math.cos(w * t)
        return lambda t: g(t) * math.sin(w * t)

    parts = {}
    err_total = 0.0
    for j in (1, 2):
        for trig in ("cos", "sin"):
            f = comp(j, trig)
            lo, e_lo = _quad(f, -T, 0.0, scale)
            hi, e_hi = _quad(f, 0.0, T, scale)
            parts[(j, trig)] = (lo, hi)
            err_total += e_lo + e_hi
    # exp(-i w t) = cos - i sin
    L1 = 0.5 * complex(sum(parts[(1, "cos")]), -sum(parts[(1, "sin")]))
    L2 = 0.5 * complex(sum(parts[(2, "cos")]), -sum(parts[(2, "sin")]))
    odd_parts = [parts[(1, "cos")], parts[(2, "sin")]]
    parity = max(abs(lo + hi) for lo, hi in odd_parts) / max(abs(L1) + abs(L2), 1e-300)
    sup = max(abs(ev.fplus(t)) for t in np.linspace(0.0, 3.0 / ev.A2, 31))
    tail = 2.0 * math.exp(-ev.A2 * T) * sup / ev.A2
    Lp = L1 + 1j * L2
    if err_total > max_error * max(abs(Lp), scale):
        raise QuadratureError(
            "quadrature error estimate above tolerance",
            {"L1": p.L1, "Gamma": p.Gamma, "error": err_total, "value": Lp},
        )
    return MelnikovValue(
        L1=p.L1, Gamma=p.Gamma, L_plus=Lp, L1_part=L1, L2_part=L2,
        quadrature_value=Lp, quadrature_error=err_total, tail_bound=tail,
        parity_defect=parity,
    )


# ---------------------------------------------------------------- residue route

def _rate(p, which):
    c = derive_separatrix_constants(p)
    if which == CANONICAL_RATE:
        return 2.0 * p.Gamma / (c.A2 * p.L1 ** 2)
    if which == ALTERNATE_RATE:
        return 2.0 * p.Gamma / c.A2 ** 2
    raise ValueError(f"unknown rate {which!r}")


def _single_pole(p, nu):
    """Residue assembly for the orbit forms, with phase rate ``nu`` in ``tau``."""
    c, oc = _sep_constants(p)
    a0 = complex(0.0, -0.5 * math.pi)
    e = math.exp(-0.5 * math.pi * nu)
    res_f1 = oc.C1tilde_sep * nu * e
    res_f2 = oc.C2_sep * ((5.0 * c.chi ** 2 + 1.0) * 1j * e + 6.0 * 0.5j * (1.0 + nu * nu) * e)
    pref = -2j * math.pi / (2.0 * c.A2 * (1.0 + math.exp(-math.pi * nu)))
    L1 = pref * res_f1
    L2 = pref * res_f2
    asin_hat = math.asin(c.chiHat)
    terms = [
        ResidueTerm(a0, res_f1, "F1 at -i*pi/2"),
        ResidueTerm(a0, res_f2, "F2 at -i*pi/2"),
        # zeros of chi^2 + (1+chi^2) sinh^2 are regular points of these forms
        ResidueTerm(complex(0.0, -asin_hat), 0j, "regular at -i*asin(chiHat)"),
        ResidueTerm(complex(0.0, -(math.pi - asin_hat)), 0j, "regular at -i*(pi-asin(chiHat))"),
    ]
    return L1, L2, terms


def _three_pole(p, rate_a0, rate_a12):
    """Alternative closed form with poles at ``a0`` and at the zeros of
    ``chi^2 + (1+chi^2) sinh^2 tau``; kept as a reconciliation candidate."""
    c, oc = _sep_constants(p)
    A2, chi, gh = c.A2, c.chi, c.GammaHat
    al = math.pi * rate_a0 / 2.0
    al12 = math.pi * rate_a12 / 2.0
    be12 = al12 / math.pi * math.asin(c.chiHat)
    pref = -2j * math.pi / (A2 * (1.0 + math.exp(-2.0 * al)))
    part1 = oc.C1tilde * (
        -2.0 * al / math.pi * math.exp(-al)
        + (7.0 + chi ** 2) / (2.0 * chi) * c.chiHat * math.exp(-2.0 * be12)
        * (1.0 - math.exp(-2.0 * al12))
    )
    k = 0.6 * chi / (1.0 + chi ** 2) ** 1.5 * (11.0 * gh ** 2 - 7.0)
    part2 = oc.C2 * (
        0.2 * (21.0 - 8.0 * gh ** 2 + 24.0 * gh ** 2 * al ** 2 / (math.pi ** 2 * chi ** 2))
        * math.exp(-al)
        + k * math.exp(-2.0 * be12) + k * math.exp(-2.0 * (al12 - be12))
    )
    L1 = pref * part1
    L2 = pref * part2
    return L1, L2


def closed_form_variants(p):
    """All candidate closed forms as ``{name: (L1, L2, residue_terms)}``."""
    out = {}
    for rate in (CANONICAL_RATE, ALTERNATE_RATE):
        nu = _rate(p, rate)
        out[f"single-pole/{rate}"] = _single_pole(p, nu)
        L1, L2 = _three_pole(p, nu, nu)
        out[f"three-pole/{rate}"] = (L1, L2, [])
    return out


def melnikov_residues(p, quadrature=None, tol=DEFAULT_TOL, raise_on_failure=True):
    """Closed-form ``Lplus`` reconciled against the quadrature route.

    Every candidate in :func:`closed_form_variants` is compared with the
    quadrature value; the canonical single-pole form must agree within
    ``tol`` (relative) or :class:`ReconciliationError` is raised.
    """
    if quadrature is None:
        quadrature = melnikov_quadrature(p)
    Lq = quadrature.quadrature_value
    variants = {}
    survivors = []
    for name, (L1, L2, _) in closed_form_variants(p).items():
        rel = abs((L1 + 1j * L2) - Lq) / abs(Lq)
        variants[name] = rel
        if rel <= tol:
            survivors.append(name)
    L1, L2, terms = closed_form_variants(p)[CANONICAL_VARIANT]
    Lp = L1 + 1j * L2
    ok = CANONICAL_VARIANT in survivors
    mv = MelnikovValue(
        L1=p.L1, Gamma=p.Gamma, L_plus=Lp, L1_part=L1, L2_part=L2,
        residue_terms=terms, quadrature_value=Lq,
        quadrature_error=quadrature.quadrature_error, tail_bound=quadrature.tail_bound,
        parity_defect=quadrature.parity_defect, agreement=variants[CANONICAL_VARIANT],
        variants=variants, survivors=survivors, reconciled=ok,
    )
    if not ok:
        log.error("reconciliation failed at L1=%r Gamma=%r: %s", p.L1, p.Gamma, variants)
        if raise_on_failure:
            raise ReconciliationError(
                f"closed form disagrees with quadrature at (L1={p.L1!r}, Gamma={p.Gamma!r}): "
                f"relative error {variants[CANONICAL_VARIANT]:.3e} > {tol:.1e}",
                cell=(p.L1, p.Gamma), agreement=variants[CANONICAL_VARIANT],
            )
    return mv


def melnikov_value(p, quadrature_only=False, tol=DEFAULT_TOL, raise_on_failure=True,
                   T_factor=DEFAULT_T_FACTOR):
    """Both routes for one parameter set (or only the quadrature)."""
    q = melnikov_quadrature(p, T_factor=T_factor)
    if quadrature_only:
        return q
    return melnikov_residues(p, quadrature=q, tol=tol, raise_on_failure=raise_on_failure)


def closed_form_lplus(p):
    """Canonical closed-form ``Lplus`` without reconciliation (cheap)."""
    L1, L2, _ = closed_form_variants(p)[CANONICAL_VARIANT]
    return L1 + 1j * L2


# ---------------------------------------------------------------- potential

def melnikov_potential(gamma0, p, L_plus=None):
    """``L(gamma0) = 2 Re(Lplus e^{i gamma0})``."""
    Lp = closed_form_lplus(p) if L_plus is None else L_plus
    return 2.0 * np.real(Lp * np.exp(1j * np.asarray(gamma0, dtype=float)))


def melnikov_potential_time_domain(gamma0, p, T_factor=DEFAULT_T_FACTOR, derivative=0):
    """Direct quadrature of ``int H2(Z0(t, gamma0)) dt`` (or its gamma0-derivative).

    ``H2`` vanishes on the circular periodic orbits, so no subtraction is
    needed.  ``derivative=1`` integrates ``dH2/dgamma`` instead.
    """
    ev = _OrbitEvaluator(p)
    T = T_factor / ev.A2
    scale = abs(p.A_oct) / ev.A2
    f = ev.h2 if derivative == 0 else ev.h2_dgamma
    total = 0.0
    for a, b in ((-T, 0.0), (0.0, T)):
        val, _ = _quad(lambda t: f(t, gamma0), a, b, scale)
        total += val
    return total


@dataclass
class HarmonicContent:
    """Discrete Fourier content of the time-domain potential.

    ``purity`` is the largest coefficient outside ``n = +-1`` relative to
    the largest coefficient overall.
    """

    gamma0: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray
    purity: float


def harmonic_content(p, n=32, T_factor=DEFAULT_T_FACTOR):
    """Sample the time-domain potential at ``n`` angles and take its DFT."""
    if n < 4:
        raise DomainError("at least four samples are needed")
    g = 2.0 * math.pi * np.arange(n) / n
    vals = np.array([melnikov_potential_time_domain(x, p, T_factor=T_factor) for x in g])
    coef = np.fft.fft(vals) / n
    top = float(np.max(np.abs(coef)))
    others = np.abs(np.delete(coef, [1, n - 1]))
    purity = float(np.max(others) / top) if top > 0 else math.nan
    return HarmonicContent(g, vals, coef, purity)


@dataclass(frozen=True)
class CriticalPoint:
    gamma0: float
    second_derivative: float
    predicted: float
    offset: float


@dataclass
class CriticalPointsResult:
    points: list
    degenerate: bool
    L_plus: complex


def critical_points(p, L_plus=None, n_bracket=17, xtol=1e-14):
    """Critical points of ``L`` on ``[0, 2 pi)`` by root-finding.

    ``L'`` is evaluated by time-domain quadrature (independent of the
    harmonic decomposition) and bracketed on a coarse grid; each root is
    compared with ``-arg Lplus`` (mod pi).  ``L'' = -L`` for a single
    harmonic, evaluated by the same quadrature.
    """
    Lp = closed_form_lplus(p) if L_plus is None else L_plus
    c = derive_separatrix_constants(p)
    scale = abs(p.A_oct) / c.A2
    if abs(Lp) < 1e-14 * scale:
        return CriticalPointsResult([], True, Lp)
    dL = lambda g: melnikov_potential_time_domain(g, p, derivative=1)
    grid = np.linspace(0.0, 2.0 * math.pi, n_bracket + 1)
    vals = [dL(g) for g in grid]
    phase = -cmath.phase(Lp)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(brentq(dL, a, b, xtol=xtol, rtol=1e-15))
    points = []
    for r in roots:
        r = r % (2.0 * math.pi)
        d2 = -melnikov_potential_time_domain(r, p)
        cands = [(phase + k * math.pi) % (2.0 * math.pi) for k in range(2)]
        pred = min(cands, key=lambda x: _angle_dist(x, r))
        points.append(CriticalPoint(r, d2, pred, _angle_dist(pred, r)))
    points.sort(key=lambda cp: cp.gamma0)
    return CriticalPointsResult(points, False, Lp)


def _angle_dist(a, b):
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


# ---------------------------------------------------------------- scan

@dataclass(frozen=True)
class ScanGrid:
    """Cells ``(L1, Gamma)`` with ``Gamma = f L1 sqrt(3/5)`` on a fraction grid.

    ``margin`` keeps every cell strictly inside the admissible set.
    """

    L1_values: tuple
    gamma_fractions: tuple
    margin: float = 1e-3

    @classmethod
    def uniform(cls, L1_range, n_L1, frac_range, n_frac, margin=1e-3):
        lo, hi = frac_range
        lo, hi = max(lo, margin), min(hi, 1.0 - margin)
        return cls(tuple(float(x) for x in np.linspace(*L1_range, n_L1)),
                   tuple(float(x) for x in np.linspace(lo, hi, n_frac)), margin)

    def cells(self):
        out = []
        for L1 in self.L1_values:
            for f in self.gamma_fractions:
                if not (self.margin <= f <= 1.0 - self.margin):
                    raise DomainError(f"gamma fraction {f!r} violates the margin {self.margin!r}")
                out.append((L1, f * L1 * SQRT_3_5))
        return out


@dataclass
class ScanCell:
    L1: float
    Gamma: float
    value: MelnikovValue | None
    flag: str
    message: str = ""


@dataclass
class ParameterScan:
    cells: list
    threshold: float
    quadrature_only: bool

    @property
    def failures(self):
        return [c for c in self.cells if c.flag in ("reconciliation_failure", "error")]

    @property
    def candidate_zeros(self):
        return [c for c in self.cells if c.flag == "candidate_zero"]


def _scan_cell(args):
    L1, Gamma, quadrature_only, tol, param_kwargs, T_factor = args
    try:
        p = SecularParams(L1=L1, Gamma=Gamma, **param_kwargs)
        mv = melnikov_value(p, quadrature_only=quadrature_only, tol=tol, raise_on_failure=False,
                            T_factor=T_factor)
        flag = "ok" if (quadrature_only or mv.reconciled) else "reconciliation_failure"
        return ScanCell(L1, Gamma, mv, flag)
    except Exception as exc:  # recorded per cell; the scan continues
        return ScanCell(L1, Gamma, None, "error", f"{type(exc).__name__}: {exc}")


def scan_parameter_set(grid, jobs=1, quadrature_only=False, tol=DEFAULT_TOL,
                       zero_threshold=1e-12, param_kwargs=None, T_factor=DEFAULT_T_FACTOR):
    """Evaluate ``Lplus`` on every grid cell, optionally in parallel.

    Results are assembled in grid order regardless of completion order.
    Cells whose ``|Lplus|`` falls below ``zero_threshold`` times the grid
    maximum are flagged ``candidate_zero``.
    """
    param_kwargs = dict(param_kwargs or {"octupole_scale": 1.0})
    tasks = [(L1, G, quadrature_only, tol, param_kwargs, T_factor) for L1, G in grid.cells()]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_scan_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        cells = [_scan_cell(t) for t in tasks]
    mags = [c.value.abs for c in cells if c.value is not None]
    top = max(mags) if mags else 0.0
    for c in cells:
        if c.flag == "ok" and c.value.abs < zero_threshold * top:
            c.flag = "candidate_zero"
    return ParameterScan(cells, zero_threshold, quadrature_only)
