"""Quadrupolar Hamiltonian ``H0``, octupolar perturbation ``H2`` and their flows.

Hamilton's equations in the two charts:

* Delaunay ``(g1, G1, gamma, Gamma)``: ``g1' = dH/dG1``, ``G1' = -dH/dg1``,
  ``gamma' = dH/dGamma``, ``Gamma' = -dH/dgamma``.
* Poincare ``(xi, eta, gamma, Gamma)``: ``xi' = -dH/deta``,
  ``eta' = dH/dxi`` (since ``dxi ^ deta = dG1 ^ dg1``) and the same
  ``(gamma, Gamma)`` pair.

In the Poincare chart, with ``G = L1 - (xi^2 + eta^2)/2``,
``K = (L1 + G)/(2 L1^2)``, ``u = G^2/L1^2``, ``S = 1 - Gamma^2/G^2`` and
``w = K xi^2``::

    H0 = K (2 (xi^2 + eta^2) - 5 S eta^2) - Gamma^2/L1^2
    H2 = A_oct sqrt(K) (xi cos(gamma) A - eta sin(gamma) (Gamma/G) B)
    A  = 5 S (7 w + 6 u - 7) - 3 u + 7
    B  = 5 S (7 - 7 w - 4 u) + 3 u - 7

Both are smooth across the circular orbit ``xi = eta = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    SQRT_3_5, SQRT_5_3, DelaunayState, PoincareState, derive_separatrix_constants,
    eccentricity, mutual_inclination,
)
from .errors import DomainError


@dataclass(frozen=True)
class OctupoleConstants:
    """Scales of ``H2`` and of its restriction to the separatrix.

    ``C1``, ``C2`` and ``C1tilde`` are the constants of the alternative
    three-pole representation (kept for the reconciliation record).  The
    ``*_sep`` constants belong to the representation actually satisfied by
    ``H2`` composed with the heteroclinic orbit::

        F1 = C1_sep cos g1 sqrt(1 - 5/3 (1+chi^2) cos^2 g1) / (1 - 5/3 cos^2 g1)
           = C1tilde_sep sinh(tau) / cosh(tau)^2
        F2 = C2_sep ((5 chi^2 + 1) R + 6 R^3),  R = 1/cosh(tau)
    """

    A_oct: float
    C1: float
    C2: float
    C1tilde: float
    K: float
    C1_sep: float
    C1tilde_sep: float
    C2_sep: float


def octupole_constants(p):
    c = derive_separatrix_constants(p)
    F = p.octupole_factor
    A_oct = p.A_oct
    q, chi, gh = c.q, c.chi, c.GammaHat
    K = 0.5 * A_oct * SQRT_3_5 * q ** 1.5
    return OctupoleConstants(
        A_oct=A_oct,
        C1=105.0 / 32.0 * F * q ** 1.5,
        C2=15.0 / 64.0 * SQRT_5_3 * F * math.sqrt(q),
        C1tilde=-15.0 / (16.0 * math.sqrt(10.0)) * F * gh * q,
        K=K,
        C1_sep=10.0 * chi * chi * q ** 1.5 * A_oct,
        C1tilde_sep=20.0 * chi * K,
        C2_sep=-2.0 * K,
    )


# ---------------------------------------------------------------- H0

def _check_G1(G1):
    if not (G1 > 0.0):
        raise DomainError("G1 must be positive (collision singularity at G1 = 0)")


def h0(s, L1):
    """``H0`` in Delaunay variables."""
    _check_G1(s.G1)
    u = s.G1 * s.G1 / (L1 * L1)
    S = 1.0 - s.Gamma * s.Gamma / (s.G1 * s.G1)
    return (1.0 - u) * (2.0 - 5.0 * S * math.sin(s.g1) ** 2) - s.Gamma ** 2 / L1 ** 2


def h0_vector_field(s, L1):
    """Hamiltonian vector field of ``H0`` as ``(g1', G1', gamma', Gamma')``."""
    _check_G1(s.G1)
    g1, G1, Gam = s.g1, s.G1, s.Gamma
    L2 = L1 * L1
    sin2 = math.sin(g1) ** 2
    S = 1.0 - Gam * Gam / (G1 * G1)
    one_u = 1.0 - G1 * G1 / L2
    g1_dot = 2.0 * G1 / L2 * (5.0 * S * sin2 - 2.0) - 10.0 * one_u * Gam * Gam / G1 ** 3 * sin2
    G1_dot = 5.0 * one_u * S * math.sin(2.0 * g1)
    gamma_dot = 10.0 * Gam / (G1 * G1) * one_u * sin2 - 2.0 * Gam / L2
    return (g1_dot, G1_dot, gamma_dot, 0.0)


def _h0_p(xi, eta, Gam, L):
    r2 = xi * xi + eta * eta
    G = L - 0.5 * r2
    K = (L + G) / (2.0 * L * L)
    S = 1.0 - Gam * Gam / (G * G)
    return K * (2.0 * r2 - 5.0 * S * eta * eta) - Gam * Gam / (L * L)


def _h0_p_grad(xi, eta, Gam, L):
    """Return ``(H0, dH0/dxi, dH0/deta, dH0/dGamma)`` in the Poincare chart."""
    r2 = xi * xi + eta * eta
    G = L - 0.5 * r2
    LL = L * L
    K = (L + G) / (2.0 * LL)
    S = 1.0 - Gam * Gam / (G * G)
    dS_dG = 2.0 * Gam * Gam / (G * G * G)
    core = 2.0 * r2 - 5.0 * S * eta * eta
    H = K * core - Gam * Gam / LL
    # dG/dxi = -xi, dK/dG = 1/(2 L^2)
    Hx = (-xi / (2.0 * LL)) * core + K * (4.0 * xi + 5.0 * dS_dG * xi * eta * eta)
    He = (-eta / (2.0 * LL)) * core + K * (4.0 * eta + 5.0 * dS_dG * eta ** 3 - 10.0 * S * eta)
    HG = 10.0 * K * Gam * eta * eta / (G * G) - 2.0 * Gam / LL
    return H, Hx, He, HG


def h0_poincare(s, L1):
    """``H0`` in Poincare variables (smooth at the origin)."""
    if not (s.xi ** 2 + s.eta ** 2 < 2.0 * L1):
        raise DomainError("xi^2 + eta^2 must stay below 2*L1")
    return _h0_p(s.xi, s.eta, s.Gamma, L1)


# ---------------------------------------------------------------- H2

def h2(s, p):
    """``H2`` in Delaunay variables, coded from the eccentricity/inclination form."""
    L1 = p.L1
    if not (s.G1 <= L1):
        raise DomainError("h2 needs G1 <= L1")
    e1 = eccentricity(L1, s.G1)
    cos_i, sin_i = mutual_inclination(s.G1, s.Gamma)
    si2 = sin_i * sin_i
    cg, sg = math.cos(s.g1), math.sin(s.g1)
    u = s.G1 ** 2 / L1 ** 2
    A = u * (5.0 * si2 * (-7.0 * cg * cg + 6.0) - 3.0) - 35.0 * sg * sg * si2 + 7.0
    B = u * (5.0 * si2 * (7.0 * cg * cg - 4.0) + 3.0) + 35.0 * sg * sg * si2 - 7.0
    return p.A_oct * e1 * (cg * math.cos(s.gamma) * A + sg * math.sin(s.gamma) * cos_i * B)


def _h2_parts(xi, eta, Gam, L):
    """Return ``(k, A, B, G)`` of the Poincare form of ``H2``."""
    r2 = xi * xi + eta * eta
    G = L - 0.5 * r2
    LL = L * L
    K = (L + G) / (2.0 * LL)
    u = G * G / LL
    S = 1.0 - Gam * Gam / (G * G)
    w = K * xi * xi
    A = 5.0 * S * (7.0 * w + 6.0 * u - 7.0) - 3.0 * u + 7.0
    B = 5.0 * S * (7.0 - 7.0 * w - 4.0 * u) + 3.0 * u - 7.0
    return math.sqrt(K), A, B, G


def _h2_p(xi, eta, gam, Gam, L, A_oct):
    k, A, B, G = _h2_parts(xi, eta, Gam, L)
    return A_oct * k * (xi * math.cos(gam) * A - eta * math.sin(gam) * (Gam / G) * B)


def _h2_p_grad(xi, eta, gam, Gam, L, A_oct):
    """Return ``(H2, dxi, deta, dgamma, dGamma)`` of ``H2`` in the Poincare chart."""
    r2 = xi * xi + eta * eta
    G = L - 0.5 * r2
    LL = L * L
    K = (L + G) / (2.0 * LL)
    k = math.sqrt(K)
    u = G * G / LL
    S = 1.0 - Gam * Gam / (G * G)
    w = K * xi * xi
    A = 5.0 * S * (7.0 * w + 6.0 * u - 7.0) - 3.0 * u + 7.0
    B = 5.0 * S * (7.0 - 7.0 * w - 4.0 * u) + 3.0 * u - 7.0
    A_S, A_w, A_u = 5.0 * (7.0 * w + 6.0 * u - 7.0), 35.0 * S, 30.0 * S - 3.0
    B_S, B_w, B_u = 5.0 * (7.0 - 7.0 * w - 4.0 * u), -35.0 * S, 3.0 - 20.0 * S
    dS_dG = 2.0 * Gam * Gam / (G * G * G)
    du_dG = 2.0 * G / LL
    dK_dG = 1.0 / (2.0 * LL)
    cg, sg = math.cos(gam), math.sin(gam)
    rho = Gam / G

    P = xi * cg * A
    Q = eta * sg * rho * B
    H = A_oct * k * (P - Q)

    # d/dxi and d/deta through G (dG = -xi dxi - eta deta) and w
    def dAB(dG, dw):
        dS = dS_dG * dG
        du = du_dG * dG
        return (A_S * dS + A_w * dw + A_u * du, B_S * dS + B_w * dw + B_u * du)

    dG_x = -xi
    dw_x = dK_dG * dG_x * xi * xi + 2.0 * K * xi
    dA_x, dB_x = dAB(dG_x, dw_x)
    dk_x = dK_dG * dG_x / (2.0 * k)
    dP_x = cg * (A + xi * dA_x)
    dQ_x = eta * sg * (rho * dB_x - Gam * dG_x / (G * G) * B)
    Hx = A_oct * (dk_x * (P - Q) + k * (dP_x - dQ_x))

    dG_e = -eta
    dw_e = dK_dG * dG_e * xi * xi
    dA_e, dB_e = dAB(dG_e, dw_e)
    dk_e = dK_dG * dG_e / (2.0 * k)
    dP_e = xi * cg * dA_e
    dQ_e = sg * rho * B + eta * sg * (rho * dB_e - Gam * dG_e / (G * G) * B)
    He = A_oct * (dk_e * (P - Q) + k * (dP_e - dQ_e))

    Hg = A_oct * k * (-xi * sg * A - eta * cg * rho * B)

    dS_dGam = -2.0 * Gam / (G * G)
    dP_Gam = xi * cg * A_S * dS_dGam
    dQ_Gam = eta * sg * (B / G + rho * B_S * dS_dGam)
    HGam = A_oct * k * (dP_Gam - dQ_Gam)
    return H, Hx, He, Hg, HGam


def h2_poincare(s, p):
    """``H2`` in Poincare variables (smooth at the origin, where it vanishes)."""
    if not (s.xi ** 2 + s.eta ** 2 < 2.0 * p.L1):
        raise DomainError("xi^2 + eta^2 must stay below 2*L1")
    return _h2_p(s.xi, s.eta, s.gamma, s.Gamma, p.L1, p.A_oct)


def h2_harmonics(g1, G1, Gamma, p):
    """Return ``(H2_plus, H2_minus)`` with ``H2 = H2+ e^{i gamma} + H2- e^{-i gamma}``.

    ``H2`` is a trigonometric polynomial of degree one in ``gamma``, so the
    two samples ``gamma = 0`` and ``gamma = pi/2`` determine it.
    """
    P = h2(DelaunayState(g1, G1, 0.0, Gamma), p)
    Q = h2(DelaunayState(g1, G1, 0.5 * math.pi, Gamma), p)
    plus = 0.5 * complex(P, -Q)
    return plus, plus.conjugate()


def h2_harmonics_poincare(xi, eta, Gamma, p):
    """Harmonic ``H2_plus`` evaluated from the Poincare chart.

    Preferred on the separatrix tails, where ``L1 - G1`` is below the
    resolution of ``G1`` but ``(xi, eta)`` are still accurate.
    """
    k, A, B, G = _h2_parts(xi, eta, Gamma, p.L1)
    P = p.A_oct * k * xi * A
    Q = -p.A_oct * k * eta * (Gamma / G) * B
    plus = 0.5 * complex(P, -Q)
    return plus, plus.conjugate()


# ---------------------------------------------------------------- flows

def poincare_rhs(y, mu, L, A_oct):
    """Vector field of ``H0 + mu H2`` for ``y = (xi, eta, gamma, Gamma)``."""
    xi, eta, gam, Gam = y[0], y[1], y[2], y[3]
    _, Hx, He, HG = _h0_p_grad(xi, eta, Gam, L)
    if mu != 0.0:
        _, Px, Pe, Pg, PG = _h2_p_grad(xi, eta, gam, Gam, L, A_oct)
        return (-(He + mu * Pe), Hx + mu * Px, HG + mu * PG, -mu * Pg)
    return (-He, Hx, HG, 0.0)


def poincare_energy(y, mu, L, A_oct):
    h = _h0_p(y[0], y[1], y[3], L)
    if mu != 0.0:
        h += mu * _h2_p(y[0], y[1], y[2], y[3], L, A_oct)
    return h


def delaunay_rhs(y, mu, L, A_oct):
    """Vector field of ``H0 + mu H2`` for ``y = (g1, G1, gamma, Gamma)``.

    ``H0`` uses its closed-form field; the ``H2`` partials are obtained from
    the Poincare gradient by the chain rule (requires ``G1 < L1``).
    """
    g1, G1, gam, Gam = y[0], y[1], y[2], y[3]
    if not (G1 > 0.0):
        raise DomainError("G1 must be positive")
    LL = L * L
    sg, cg = math.sin(g1), math.cos(g1)
    sin2 = sg * sg
    S = 1.0 - Gam * Gam / (G1 * G1)
    one_u = 1.0 - G1 * G1 / LL
    g1_dot = 2.0 * G1 / LL * (5.0 * S * sin2 - 2.0) - 10.0 * one_u * Gam * Gam / G1 ** 3 * sin2
    G1_dot = 10.0 * one_u * S * sg * cg
    gamma_dot = 10.0 * Gam / (G1 * G1) * one_u * sin2 - 2.0 * Gam / LL
    if mu == 0.0:
        return (g1_dot, G1_dot, gamma_dot, 0.0)
    r2 = 2.0 * (L - G1)
    r = math.sqrt(r2)
    xi, eta = r * cg, -r * sg
    _, Px, Pe, Pg, PG = _h2_p_grad(xi, eta, gam, Gam, L, A_oct)
    H_g = eta * Px - xi * Pe
    H_G = -(xi * Px + eta * Pe) / r2
    return (g1_dot + mu * H_G, G1_dot - mu * H_g, gamma_dot + mu * PG, -mu * Pg)


def delaunay_energy(y, mu, L, A_oct):
    g1, G1, gam, Gam = y[0], y[1], y[2], y[3]
    u = G1 * G1 / (L * L)
    S = 1.0 - Gam * Gam / (G1 * G1)
    h = (1.0 - u) * (2.0 - 5.0 * S * math.sin(g1) ** 2) - Gam * Gam / (L * L)
    if mu != 0.0:
        r = math.sqrt(max(2.0 * (L - G1), 0.0))
        h += mu * _h2_p(r * math.cos(g1), -r * math.sin(g1), gam, Gam, L, A_oct)
    return h


def perturbed_vector_field(s, mu, p):
    """Hamiltonian vector field of ``H0 + mu H2`` in the chart of ``s``.

    Returns a tuple ordered like the fields of the state.
    """
    if mu < 0.0:
        raise DomainError("mu must be non-negative")
    if isinstance(s, PoincareState):
        if not (s.xi ** 2 + s.eta ** 2 < 2.0 * p.L1):
            raise DomainError("xi^2 + eta^2 must stay below 2*L1")
        return poincare_rhs((s.xi, s.eta, s.gamma, s.Gamma), mu, p.L1, p.A_oct)
    if isinstance(s, DelaunayState):
        if mu != 0.0 and not (s.G1 < p.L1):
            raise DomainError("Delaunay chart is singular at G1 = L1; use the Poincare chart")
        return delaunay_rhs((s.g1, s.G1, s.gamma, s.Gamma), mu, p.L1, p.A_oct)
    raise TypeError(f"unsupported state type {type(s).__name__}")


def total_energy(s, mu, p):
    """Value of ``H0 + mu H2`` at a state in either chart."""
    if isinstance(s, PoincareState):
        return poincare_energy((s.xi, s.eta, s.gamma, s.Gamma), mu, p.L1, p.A_oct)
    return delaunay_energy((s.g1, s.G1, s.gamma, s.Gamma), mu, p.L1, p.A_oct)


def h0_poincare_hessian_origin(L1, Gamma):
    """Analytic Hessian of ``H0`` at ``xi = eta = 0``."""
    gh2 = (Gamma / L1) ** 2
    return np.diag([4.0 / L1, -2.0 * (3.0 - 5.0 * gh2) / L1])


def linear_flow_matrix(L1, Gamma):
    """Matrix of the linearized ``(xi, eta)`` flow at the circular orbit."""
    H = h0_poincare_hessian_origin(L1, Gamma)
    # xi' = -H_eta, eta' = H_xi
    return np.array([[0.0, -H[1, 1]], [H[0, 0], 0.0]])
