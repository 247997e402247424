"""Heteroclinic orbit of ``H0``, its endpoints and the identities along it.

With ``tau = A2 t``, ``s = sinh(tau)`` and ``D = sqrt(chi^2 + (1+chi^2) s^2)``
the branch with ``g1`` in ``(0, pi)`` reads::

    cos g1 = sqrt(3/5) s / D
    G1     = Gamma sqrt(5/3) sqrt(1 + (3/5)(L1/Gamma)^2 s^2) / cosh(tau)
    gamma  = gamma0 - 2 Gamma t / L1^2 + arctan(tanh(tau) / chi)

so ``cos g1`` increases: the orbit leaves the circular periodic orbit at
``g1_max`` and lands on the one at ``g1_min``.  All evaluations below are
written with ``tanh`` and ``sech`` so that the tails stay accurate
(``L1 - G1`` is recovered without cancellation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SQRT_3_5, SQRT_5_3, DelaunayState, derive_separatrix_constants
from .errors import DomainError
from .hamiltonians import h0, h0_vector_field


@dataclass(frozen=True)
class FixedPoints:
    g1_min: float
    g1_max: float


@dataclass(frozen=True)
class SeparatrixSample:
    """State on the heteroclinic orbit; fields may be arrays.

    ``e1`` and ``LmG1 = L1 - G1`` are computed directly rather than from
    ``G1`` so that they keep full relative accuracy on the tails.
    """

    t: np.ndarray
    g1: np.ndarray
    G1: np.ndarray
    gamma: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    e1: np.ndarray
    LmG1: np.ndarray
    cos_g1: np.ndarray
    sin_g1: np.ndarray


@dataclass(frozen=True)
class PeriodicOrbit:
    """Circular periodic orbit ``(g1*, L1, gamma0 - 2 Gamma t / L1^2, Gamma)``."""

    g1: float
    L1: float
    gamma0: float
    Gamma: float

    def at(self, t):
        t = np.asarray(t, dtype=float)
        gamma = self.gamma0 - 2.0 * self.Gamma * t / self.L1 ** 2
        return self.g1, self.L1, gamma, self.Gamma

    def poincare(self, t):
        t = np.asarray(t, dtype=float)
        gamma = self.gamma0 - 2.0 * self.Gamma * t / self.L1 ** 2
        zero = np.zeros_like(gamma)
        return zero, zero, gamma, self.Gamma


def fixed_points(p):
    """Hyperbolic circular equilibria of the reduced ``H0`` flow."""
    gt2 = p.gamma_tilde_sq
    if not (gt2 > 0.4):
        raise DomainError("GammaTilde^2 <= 2/5: no hyperbolic circular orbits")
    g1_min = math.asin(math.sqrt(2.0 / (5.0 * gt2)))
    return FixedPoints(g1_min, math.pi - g1_min)


def _sech_tanh(tau):
    a = np.abs(tau)
    e = np.exp(-2.0 * a)
    sech = 2.0 * np.exp(-a) / (1.0 + e)
    return sech, np.tanh(tau)


def _orbit_arrays(t, p, dtype=float):
    c = derive_separatrix_constants(p)
    one = dtype(1)
    A2, chi, q = one * c.A2, one * c.chi, one * c.q
    t_arr = np.asarray(t, dtype=dtype)
    sech, th = _sech_tanh(A2 * t_arr)
    chi2 = chi * chi
    Dn = np.sqrt(chi2 * sech * sech + (one + chi2) * th * th)
    cos_g1 = np.sqrt(one * 3 / 5) * th / Dn
    sin_g1 = np.sqrt(chi2 * sech * sech + (one * 2 / 5 + chi2) * th * th) / Dn
    W = np.sqrt(th * th + (one * 5 / 3) * (one * c.GammaHat) ** 2 * sech * sech)
    LmG1 = p.L1 * q * sech * sech / (one + W)
    gamma2 = np.arctan(th / chi)
    return t_arr, cos_g1, sin_g1, p.L1 * W, LmG1, np.sqrt(q) * sech, gamma2


def separatrix_sample(t, gamma0, p):
    """Evaluate the heteroclinic orbit at time(s) ``t`` with phase ``gamma0``."""
    t_arr, cos_g1, sin_g1, G1, LmG1, e1, gamma2 = _orbit_arrays(t, p)
    rho = np.sqrt(2.0 * LmG1)
    gamma1 = -2.0 * p.Gamma * t_arr / p.L1 ** 2
    return SeparatrixSample(
        t=t_arr, g1=np.arctan2(sin_g1, cos_g1), G1=G1, gamma=gamma0 + gamma1 + gamma2,
        gamma1=gamma1, gamma2=gamma2, xi=rho * cos_g1, eta=-rho * sin_g1,
        e1=e1, LmG1=LmG1, cos_g1=cos_g1, sin_g1=sin_g1,
    )


def separatrix_velocity(t, p):
    """Analytic time derivatives ``(g1', G1', gamma')`` along the orbit."""
    c = derive_separatrix_constants(p)
    L1, Gam = p.L1, p.Gamma
    tau = c.A2 * np.asarray(t, dtype=float)
    sech, th = _sech_tanh(tau)
    chi2 = c.chi * c.chi
    Dn = np.sqrt(chi2 * sech * sech + (1.0 + chi2) * th * th)
    sin_g1 = np.sqrt(chi2 * sech * sech + (0.4 + chi2) * th * th) / Dn
    g1_dot = -SQRT_3_5 * c.A2 * chi2 * sech * sech / (Dn ** 3 * sin_g1)
    W = np.sqrt(th * th + 5.0 / 3.0 * c.GammaHat ** 2 * sech * sech)
    G1_dot = L1 * c.A2 * c.q * th * sech * sech / W
    gamma_dot = -2.0 * Gam / L1 ** 2 + c.A2 * c.chi * sech * sech / (chi2 + th * th)
    return g1_dot, G1_dot, gamma_dot


def separatrix_residual(t, gamma0, p):
    """Max-norm mismatch between the analytic velocity and the ``H0`` field."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    smp = separatrix_sample(t_arr, gamma0, p)
    vel = separatrix_velocity(t_arr, p)
    out = np.empty(t_arr.shape)
    for j in range(t_arr.size):
        state = DelaunayState(float(smp.g1[j]), float(smp.G1[j]), float(smp.gamma[j]), p.Gamma)
        f = h0_vector_field(state, p.L1)
        out[j] = max(abs(vel[0][j] - f[0]), abs(vel[1][j] - f[1]), abs(vel[2][j] - f[2]), abs(f[3]))
    return out if np.ndim(t) else float(out[0])


def separatrix_energy_residual(t, p):
    """``H0(sample) + Gamma^2/L1^2`` along the orbit."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    smp = separatrix_sample(t_arr, 0.0, p)
    target = -(p.Gamma / p.L1) ** 2
    out = np.array([
        h0(DelaunayState(float(g), float(G), 0.0, p.Gamma), p.L1) - target
        for g, G in zip(smp.g1, smp.G1)
    ])
    return out if np.ndim(t) else float(out[0])


def g1_closed_ode_rhs(g1, p):
    """Right-hand side of the closed equation for ``g1`` along the orbit.

    ``g1' = -A1 (1 - 5/3 (1+chi^2) cos^2 g1) sqrt(1 - 5/3 cos^2 g1) / sin g1``;
    the minus sign reflects the direction of travel (``g1`` decreases).
    """
    c = derive_separatrix_constants(p)
    cg2 = math.cos(g1) ** 2
    return -c.A1 * (1.0 - 5.0 / 3.0 * (1.0 + c.chi ** 2) * cg2) * math.sqrt(
        1.0 - 5.0 / 3.0 * cg2) / math.sin(g1)


def g1_closed_ode_check(g1, p):
    """Difference between the closed ``g1`` equation and the ``H0`` field.

    ``G1`` is eliminated through ``G1 = Gamma sqrt(5/3) sin g1 / sqrt(1 - 5/3 cos^2 g1)``.
    """
    fp = fixed_points(p)
    if not (fp.g1_min < g1 < fp.g1_max):
        raise DomainError("g1 outside the separatrix interval (g1_min, g1_max)")
    cg2 = math.cos(g1) ** 2
    G1 = p.Gamma * SQRT_5_3 * math.sin(g1) / math.sqrt(1.0 - 5.0 / 3.0 * cg2)
    direct = h0_vector_field(DelaunayState(g1, G1, 0.0, p.Gamma), p.L1)[0]
    return direct - g1_closed_ode_rhs(g1, p)


def periodic_orbits(gamma0, p):
    """The two circular periodic orbits ``(Z0_min, Z0_max)``."""
    fp = fixed_points(p)
    return (PeriodicOrbit(fp.g1_min, p.L1, gamma0, p.Gamma),
            PeriodicOrbit(fp.g1_max, p.L1, gamma0, p.Gamma))


IDENTITY_NAMES = ("G1", "e1", "cos_i", "sin_i", "cos_gamma2", "sin_gamma2")


def separatrix_identities(t, p):
    """Residuals of the six on-orbit identities written as functions of ``g1``.

    Returns a dict of arrays keyed by :data:`IDENTITY_NAMES` plus
    ``orbit_equation`` (``(1 - Gamma^2/G1^2) sin^2 g1 - 2/5``) and
    ``pythagoras`` (``cos^2 gamma2 + sin^2 gamma2 - 1`` from the ``g1`` forms).

    The forms in ``g1`` lose accuracy on the tails (they subtract nearly
    equal numbers as ``g1`` approaches its endpoints), so the check is run
    in extended precision (``numpy.longdouble``).
    """
    c = derive_separatrix_constants(p)
    ld = np.longdouble
    t_arr, cg, sg, G1, _, e1, gamma2 = _orbit_arrays(np.atleast_1d(t), p, dtype=ld)
    Gam, L1, chi = ld(p.Gamma), ld(p.L1), ld(c.chi)
    cg2 = cg * cg
    base = 1 - ld(5) / 3 * cg2
    num = np.maximum(1 - ld(5) / 3 * (1 + chi * chi) * cg2, ld(0))
    cos_i = Gam / G1
    sin_i = np.sqrt((G1 - Gam) * (G1 + Gam)) / G1
    cos_g2_form = np.sqrt(base)
    sin_g2_form = np.sqrt(ld(5) / 3) * cg
    res = {
        "G1": G1 - Gam * np.sqrt(ld(5) / 3) * sg / np.sqrt(base),
        "e1": e1 - np.sqrt(ld(2) / 3) * Gam / (L1 * chi) * np.sqrt(num / base),
        "cos_i": cos_i - np.sqrt(ld(3) / 5) * np.sqrt(base) / sg,
        "sin_i": sin_i - np.sqrt(ld(2) / 5) / sg,
        "cos_gamma2": np.cos(gamma2) - cos_g2_form,
        "sin_gamma2": np.sin(gamma2) - sin_g2_form,
        "orbit_equation": (1 - (Gam / G1) ** 2) * sg * sg - ld(2) / 5,
        "pythagoras": cos_g2_form ** 2 + sin_g2_form ** 2 - 1,
    }
    return {k: v.astype(float) for k, v in res.items()}


def asymptotic_rate(p, T_factor=30.0, n=200):
    """Fit the exponential rate at which the orbit approaches its endpoints.

    The distance to the circular orbit in the Poincare chart,
    ``rho = sqrt(2 (L1 - G1))``, is sampled on ``|t| in [T/2, T]`` with
    ``T = T_factor / A2`` and a least-squares slope of ``log rho`` is
    returned for both ends as ``(rate_minus, rate_plus)``.
    """
    c = derive_separatrix_constants(p)
    T = T_factor / c.A2
    rates = []
    for sign in (-1.0, 1.0):
        t = sign * np.linspace(0.5 * T, T, n)
        rho = np.sqrt(2.0 * separatrix_sample(t, 0.0, p).LmG1)
        slope = np.polyfit(np.abs(t), np.log(rho), 1)[0]
        rates.append(-slope)
    return tuple(rates)


def elliptic_quartic_roots(L1, Gamma):
    """Roots in ``G1`` of ``3 G1^4 - 10 Gamma^2 G1^2 + 5 L1^2 Gamma^2``.

    For ``0 < Gamma < L1 sqrt(3/5)`` the discriminant in ``G1^2`` is
    negative, so all four roots are complex; see :func:`elliptic_points`.
    """
    return np.roots([3.0, 0.0, -10.0 * Gamma ** 2, 0.0, 5.0 * L1 ** 2 * Gamma ** 2])


def elliptic_points(p):
    """Equilibria of ``H0`` at ``g1 = pi/2`` with ``Gamma < G1 < L1``.

    Setting ``dg1/dt = 0`` at ``sin g1 = 1`` gives ``3 G1^4 = 5 L1^2 Gamma^2``.
    Returns the list of ``(g1, G1)`` pairs (``g1 = pi/2`` and ``3 pi/2``).
    """
    G = (5.0 / 3.0 * p.L1 ** 2 * p.Gamma ** 2) ** 0.25
    if not (p.Gamma < G < p.L1):
        return []
    return [(0.5 * math.pi, G), (1.5 * math.pi, G)]
