"""Parameters, coordinate charts and derived constants.

The reduced secular phase space carries two charts.  Delaunay-type
variables ``(g1, G1, gamma, Gamma)`` are singular at circular inner
orbits ``G1 = L1``; the Poincare variables ``(xi, eta, gamma, Gamma)``
with ``xi + i*eta = sqrt(2(L1 - G1)) * exp(-i*g1)`` regularize that
circle.  Both are symplectic: ``dxi ^ deta = dG1 ^ dg1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

SQRT_3_5 = math.sqrt(3.0 / 5.0)
SQRT_5_3 = math.sqrt(5.0 / 3.0)


def _require_positive(name, value):
    if not (value > 0.0) or not math.isfinite(value):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Masses, reduced masses and barycentric weights of the hierarchy."""

    m0: float
    m1: float
    m2: float
    M0: float
    M1: float
    M2: float
    mu1: float
    mu2: float
    sigma0: float
    sigma1: float


def derive_system(m0, m1, m2):
    """Build :class:`SystemParams` from the three point masses.

    ``M2`` is taken as the total mass, the Keplerian mass of the outer
    pair (inner barycentre, body 2).
    """
    for name, value in (("m0", m0), ("m1", m1), ("m2", m2)):
        _require_positive(name, float(value))
    m0, m1, m2 = float(m0), float(m1), float(m2)
    M0 = m0
    M1 = m0 + m1
    M2 = m0 + m1 + m2
    mu1 = 1.0 / (1.0 / M0 + 1.0 / m1)
    mu2 = 1.0 / (1.0 / M1 + 1.0 / m2)
    return SystemParams(
        m0=m0, m1=m1, m2=m2, M0=M0, M1=M1, M2=M2,
        mu1=mu1, mu2=mu2, sigma0=m0 / M1, sigma1=m1 / M1,
    )


def _default_system():
    return derive_system(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class SecularParams:
    """Actions and outer-orbit data defining one secular system.

    ``octupole_scale`` overrides the physical octupole factor
    ``(a1^3/a2^4) * e2/(1-e2^2)^(5/2)``.  Set it to 1 to work with the
    normalized model in which the overall perturbation size lives in the
    single knob ``mu`` of the dynamics module.
    """

    L1: float
    Gamma: float
    L2: float = 50.0
    delta: float = 0.6
    system: SystemParams = field(default_factory=_default_system)
    octupole_scale: float | None = None

    def __post_init__(self):
        _require_positive("L1", self.L1)
        _require_positive("L2", self.L2)
        if not (0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not (self.Gamma > 0.0):
            raise DomainError(f"Gamma must be positive, got {self.Gamma!r}")
        if not (self.Gamma < self.L1 * SQRT_3_5):
            raise DomainError(
                "Gamma must satisfy Gamma < L1*sqrt(3/5) "
                f"(Gamma={self.Gamma!r}, bound={self.L1 * SQRT_3_5!r})"
            )
        if self.octupole_scale is not None and not math.isfinite(self.octupole_scale):
            raise DomainError("octupole_scale must be finite")

    @classmethod
    def normalized(cls, L1, Gamma, **kwargs):
        """Parameters with unit octupole factor (``A_oct = -15/64``)."""
        kwargs.setdefault("octupole_scale", 1.0)
        return cls(L1=float(L1), Gamma=float(Gamma), **kwargs)

    @property
    def C(self):
        return self.delta * self.L2

    @property
    def e2(self):
        return math.sqrt(1.0 - self.delta ** 2)

    @property
    def a1(self):
        s = self.system
        return self.L1 ** 2 / (s.mu1 ** 2 * s.M1)

    @property
    def a2(self):
        s = self.system
        return self.L2 ** 2 / (s.mu2 ** 2 * s.M2)

    @property
    def gamma_hat(self):
        return self.Gamma / self.L1

    @property
    def gamma_tilde_sq(self):
        return 1.0 - self.gamma_hat ** 2

    @property
    def octupole_factor(self):
        if self.octupole_scale is not None:
            return float(self.octupole_scale)
        e2 = self.e2
        return self.a1 ** 3 / self.a2 ** 4 * e2 / (1.0 - e2 ** 2) ** 2.5

    @property
    def A_oct(self):
        return -15.0 / 64.0 * self.octupole_factor

    @property
    def alpha1(self):
        """Time-scale constant of the normalized Hamiltonian (reporting only).

        The unsubscripted reduced mass is read as ``mu2``; the value never
        enters the flow.
        """
        s = self.system
        e2 = self.e2
        return -(self.L1 ** 4 * s.M2 * s.mu2 ** 6 * s.m2) / (
            8.0 * s.M1 ** 2 * s.mu1 ** 3 * (1.0 - e2 ** 2) ** 1.5
        )


@dataclass(frozen=True)
class SeparatrixConstants:
    """Constants of the heteroclinic orbit and of the closed-form potential.

    ``q = 1 - (5/3)(Gamma/L1)^2``.  ``A2`` is the hyperbolic rate of the
    circular periodic orbits (the eigenvalue of the linearized flow in the
    Poincare chart) and ``nu = 2*Gamma/(A2*L1^2)`` is the frequency of the
    slow phase measured in ``tau = A2*t``.
    """

    chi: float
    A1: float
    A2: float
    alpha: float
    beta: float
    GammaHat: float
    chiHat: float
    nu: float
    q: float


def derive_separatrix_constants(p):
    """Compute :class:`SeparatrixConstants` for ``p``."""
    L1, G = float(p.L1), float(p.Gamma)
    if not (0.0 < G < L1 * SQRT_3_5):
        raise DomainError("Gamma outside (0, L1*sqrt(3/5))")
    gh = G / L1
    q = 1.0 - 5.0 / 3.0 * gh * gh
    chi = math.sqrt(2.0 / 3.0) * gh / math.sqrt(q)
    A1 = 6.0 * SQRT_3_5 * q / G
    A2 = 2.0 * math.sqrt(6.0) * math.sqrt(q) / L1
    nu = 2.0 * G / (A2 * L1 * L1)
    alpha = math.pi * G / (A2 * L1 * L1)
    chi_hat = chi / math.sqrt(1.0 + chi * chi)
    beta = alpha / math.pi * math.asin(chi_hat)
    return SeparatrixConstants(
        chi=chi, A1=A1, A2=A2, alpha=alpha, beta=beta,
        GammaHat=gh, chiHat=chi_hat, nu=nu, q=q,
    )


@dataclass(frozen=True)
class DelaunayState:
    g1: float
    G1: float
    gamma: float
    Gamma: float


@dataclass(frozen=True)
class PoincareState:
    xi: float
    eta: float
    gamma: float
    Gamma: float


def eccentricity(L, G):
    """Eccentricity ``sqrt(1 - G^2/L^2)`` of an ellipse with actions ``L, G``."""
    L, G = float(L), float(G)
    if not (G > 0.0) or G > L:
        raise DomainError(f"eccentricity needs 0 < G <= L (G={G!r}, L={L!r})")
    # (L-G)(L+G) avoids cancellation for nearly circular orbits
    return math.sqrt((L - G) * (L + G)) / L


def mutual_inclination(G1, Gamma):
    """Return ``(cos i, sin i)`` with ``cos i = Gamma/G1`` and ``sin i >= 0``."""
    G1, Gamma = float(G1), float(Gamma)
    if not (G1 > 0.0):
        raise DomainError("G1 must be positive")
    if abs(Gamma) > G1:
        raise DomainError(f"|Gamma| > G1 is unphysical (Gamma={Gamma!r}, G1={G1!r})")
    c = Gamma / G1
    s = math.sqrt((G1 - abs(Gamma)) * (G1 + abs(Gamma))) / G1
    return c, s


def delaunay_to_poincare(s, L1):
    """Map a Delaunay state to the Poincare chart."""
    if not (s.G1 > 0.0) or s.G1 > L1:
        raise DomainError(f"delaunay_to_poincare needs 0 < G1 <= L1 (G1={s.G1!r})")
    r = math.sqrt(2.0 * (L1 - s.G1))
    return PoincareState(r * math.cos(s.g1), -r * math.sin(s.g1), s.gamma, s.Gamma)


def poincare_to_delaunay(s, L1):
    """Map a Poincare state to the Delaunay chart.

    At the origin the angle ``g1`` is undefined and returned as NaN.
    """
    r2 = s.xi * s.xi + s.eta * s.eta
    if not (r2 < 2.0 * L1):
        raise DomainError("xi^2 + eta^2 must stay below 2*L1")
    G1 = L1 - 0.5 * r2
    g1 = math.atan2(-s.eta, s.xi) if r2 > 0.0 else math.nan
    return DelaunayState(g1, G1, s.gamma, s.Gamma)
