"""Poincare sections ``gamma = const`` on a fixed energy level.

On the section the state is ``x = (xi, eta)``; ``Gamma`` is recovered from
the energy by Newton.  Near the circular periodic orbit ``gamma`` decreases
monotonically, so the flow from the section ``gamma = a`` to
``gamma = a - Delta`` is a well-defined leg map.

The full return map of the hyperbolic periodic orbit expands by
``exp(A2 * T_ret)``, which is far beyond what a single finite-difference
linearization can resolve.  The fixed point is therefore computed by
multiple shooting over ``n_legs`` short legs; the monodromy is the product
of the leg Jacobians.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..core import SecularParams
from ..errors import DomainError, EscapeError, NewtonDivergence
from ..hamiltonians import _h0_p_grad, _h2_p_grad
from .integrator import Event, IntegratorConfig, integrate

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Section:
    """Section ``gamma = gamma0`` on the energy level ``energy``.

    ``energy=None`` selects the level of the unperturbed circular orbit,
    ``-Gamma^2/L1^2``, which contains the continuation of that orbit for
    every ``mu``.
    """

    p: SecularParams
    gamma0: float = 0.0
    energy: float | None = None

    @property
    def level(self):
        if self.energy is not None:
            return float(self.energy)
        return -(self.p.Gamma / self.p.L1) ** 2


@dataclass(frozen=True)
class LegResult:
    x: np.ndarray
    Gamma: float
    time: float


class ReturnMap:
    """Leg maps and the full return map of a :class:`Section`."""

    def __init__(self, section, mu, config=None):
        if mu < 0.0:
            raise DomainError("mu must be non-negative")
        self.section = section
        self.mu = float(mu)
        self.config = config or IntegratorConfig()
        p = section.p
        self._L, self._A = p.L1, p.A_oct
        self.h = section.level
        self.omega = 2.0 * p.Gamma / p.L1 ** 2  # |d gamma/dt| on the circular orbit

    def lift(self, x, gamma, Gamma_guess=None, tol=1e-15, max_iter=50):
        """Solve ``H(xi, eta, gamma, Gamma) = h`` for ``Gamma`` by Newton."""
        xi, eta = float(x[0]), float(x[1])
        G = float(Gamma_guess) if Gamma_guess is not None else self.section.p.Gamma
        L, A, mu = self._L, self._A, self.mu
        for _ in range(max_iter):
            H, _, _, HG = _h0_p_grad(xi, eta, G, L)
            if mu != 0.0:
                H2, _, _, _, PG = _h2_p_grad(xi, eta, gamma, G, L, A)
                H += mu * H2
                HG += mu * PG
            if HG == 0.0:
                break
            step = (H - self.h) / HG
            G -= step
            if abs(step) <= tol * max(1.0, abs(G)):
                return G
        raise NewtonDivergence(f"energy lift failed at x={tuple(x)!r}, gamma={gamma!r}")

    def flow(self, x, gamma_from, gamma_to, Gamma_guess=None):
        """Flow a section point from ``gamma_from`` to ``gamma_to < gamma_from``."""
        if not gamma_to < gamma_from:
            raise DomainError("legs run towards decreasing gamma")
        G = self.lift(x, gamma_from, Gamma_guess)
        y0 = np.array([x[0], x[1], gamma_from, G])
        t_max = 4.0 * (gamma_from - gamma_to) / self.omega
        ev = Event("section", lambda t, y: y[2] - gamma_to, terminal=True, direction=-1.0)
        tr = integrate(y0, (0.0, t_max), self.mu, self.section.p, self.config, events=[ev])
        hits = tr.hits("section")
        if not hits:
            raise EscapeError(
                f"no crossing of gamma={gamma_to!r} within t={t_max!r} from x={tuple(x)!r}")
        hit = hits[-1]
        return LegResult(hit.y[:2].copy(), float(hit.y[3]), float(hit.t))

    def __call__(self, x):
        g0 = self.section.gamma0
        return self.flow(x, g0, g0 - TWO_PI)

    def jacobian(self, x, gamma_from, gamma_to, step):
        """Central finite-difference Jacobian of a leg map."""
        x = np.asarray(x, dtype=float)
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = step
            fp = self.flow(x + e, gamma_from, gamma_to).x
            fm = self.flow(x - e, gamma_from, gamma_to).x
            J[:, j] = (fp - fm) / (2.0 * step)
        return J


def return_map(section, point, mu, config=None):
    """One return of ``point = (xi, eta)`` to ``section``; returns a :class:`LegResult`."""
    return ReturnMap(section, mu, config)(point)


@dataclass
class FixedPoint:
    """Hyperbolic periodic orbit sampled on ``n_legs`` sections.

    ``points[k]`` lies on ``gamma = sections[k]``; leg ``k`` maps it to
    ``points[k+1]`` (cyclically).  ``v_u[k]``/``v_s[k]`` are unit unstable
    and stable directions at node ``k``.
    """

    mu: float
    section: Section
    sections: np.ndarray
    points: np.ndarray
    Gammas: np.ndarray
    leg_times: np.ndarray
    leg_jacobians: np.ndarray
    v_u: np.ndarray
    v_s: np.ndarray
    log_lambda_u: float
    log_lambda_s: float
    determinant: float
    residual: float
    iterations: int

    @property
    def n_legs(self):
        return len(self.sections)

    @property
    def return_time(self):
        return float(np.sum(self.leg_times))

    @property
    def monodromy(self):
        """Product of the leg Jacobians (entries of size ``exp(A2 T_ret)``)."""
        M = np.eye(2)
        for J in self.leg_jacobians:
            M = J @ M
        return M

    @property
    def point(self):
        return self.points[0]


def _eigen_directions(jacs, cycles=4):
    M = len(jacs)
    v = np.array([1.0, 1.0]) / math.sqrt(2.0)
    v_u = np.empty((M, 2))
    log_u = 0.0
    for c in range(cycles):
        log_u = 0.0
        for k in range(M):
            v_u[k] = v
            w = jacs[k] @ v
            n = np.linalg.norm(w)
            log_u += math.log(n)
            v = w / n
    inv = [np.linalg.inv(J) for J in jacs]
    v = np.array([1.0, -1.0]) / math.sqrt(2.0)
    v_s = np.empty((M, 2))
    log_s = 0.0
    for c in range(cycles):
        log_s = 0.0
        for k in range(M - 1, -1, -1):
            w = inv[k] @ v
            n = np.linalg.norm(w)
            log_s -= math.log(n)
            v = w / n
            v_s[k] = v
    return v_u, v_s, log_u, log_s


def find_fixed_point(section, mu, config=None, n_legs=32, fd_step=2e-5, tol=1e-13,
                     max_iter=12, guess=None):
    """Locate the hyperbolic periodic orbit by multiple shooting.

    Newton on the cyclic system ``P_k(x_k) = x_{k+1}`` with leg Jacobians
    from central differences of step ``fd_step * L1``.  Raises
    :class:`NewtonDivergence` if the residual does not drop below ``tol``.
    """
    if n_legs < 2:
        raise DomainError("n_legs must be at least 2")
    rm = ReturnMap(section, mu, config)
    L = section.p.L1
    h = fd_step * L
    delta = TWO_PI / n_legs
    secs = section.gamma0 - delta * np.arange(n_legs)
    X = np.zeros((n_legs, 2)) if guess is None else np.array(guess, dtype=float).reshape(n_legs, 2)
    res = np.inf
    for it in range(max_iter + 1):
        legs = [rm.flow(X[k], secs[k], secs[k] - delta) for k in range(n_legs)]
        R = np.array([legs[k].x - X[(k + 1) % n_legs] for k in range(n_legs)])
        res = float(np.max(np.abs(R)))
        log.debug("multiple shooting iteration %d residual %.3e", it, res)
        jacs = np.array([rm.jacobian(X[k], secs[k], secs[k] - delta, h) for k in range(n_legs)])
        if res <= tol * max(1.0, L) or it == max_iter:
            break
        B = np.zeros((2 * n_legs, 2 * n_legs))
        for k in range(n_legs):
            kk = (k + 1) % n_legs
            B[2 * k:2 * k + 2, 2 * k:2 * k + 2] += jacs[k]
            B[2 * k:2 * k + 2, 2 * kk:2 * kk + 2] -= np.eye(2)
        dX = np.linalg.solve(B, -R.ravel())
        X = X + dX.reshape(n_legs, 2)
    if not res <= tol * max(1.0, L):
        raise NewtonDivergence(f"multiple shooting residual {res:.3e} above {tol:.1e}")
    v_u, v_s, log_u, log_s = _eigen_directions(jacs)
    Gammas = np.array([rm.lift(X[k], secs[k]) for k in range(n_legs)])
    return FixedPoint(
        mu=float(mu), section=section, sections=secs, points=X, Gammas=Gammas,
        leg_times=np.array([lg.time for lg in legs]), leg_jacobians=jacs,
        v_u=v_u, v_s=v_s, log_lambda_u=log_u, log_lambda_s=log_s,
        determinant=float(np.prod([np.linalg.det(J) for J in jacs])),
        residual=res, iterations=it,
    )
