import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secsplit.core import DelaunayState, PoincareState, SecularParams, delaunay_to_poincare
from secsplit.errors import DomainError
from secsplit.hamiltonians import (
    _h0_p_grad, _h2_p_grad, delaunay_rhs, h0, h0_poincare, h0_poincare_hessian_origin,
    h0_vector_field, h2, h2_harmonics, h2_poincare, linear_flow_matrix, perturbed_vector_field,
    poincare_rhs, total_energy,
)

P = SecularParams.normalized(1.0, 0.3)


def _num_grad(f, x, h=1e-6):
    x = np.asarray(x, float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


@settings(max_examples=60, deadline=None)
@given(g1=st.floats(0.1, 3.0), G1=st.floats(0.35, 0.95), gam=st.floats(-3, 3))
def test_h0_and_h2_agree_across_charts(g1, G1, gam):
    d = DelaunayState(g1, G1, gam, 0.3)
    s = delaunay_to_poincare(d, P.L1)
    assert h0(d, P.L1) == pytest.approx(h0_poincare(s, P.L1), abs=1e-13)
    assert h2(d, P) == pytest.approx(h2_poincare(s, P), abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(g1=st.floats(0.1, 3.0), G1=st.floats(0.35, 0.95))
def test_h0_vector_field_matches_derivatives(g1, G1):
    f = lambda x: h0(DelaunayState(x[0], x[1], 0.0, x[2]), P.L1)
    g = _num_grad(f, [g1, G1, 0.3])
    v = h0_vector_field(DelaunayState(g1, G1, 0.0, 0.3), P.L1)
    assert v[0] == pytest.approx(g[1], abs=1e-8)
    assert v[1] == pytest.approx(-g[0], abs=1e-8)
    assert v[2] == pytest.approx(g[2], abs=1e-8)


def test_poincare_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(20):
        xi, eta = rng.uniform(-0.8, 0.8, 2)
        gam, Gam = rng.uniform(-3, 3), 0.3
        H = lambda x: _h0_p_grad(x[0], x[1], x[2], 1.0)[0]
        g = _num_grad(H, [xi, eta, Gam])
        _, Hx, He, HG = _h0_p_grad(xi, eta, Gam, 1.0)
        assert np.allclose([Hx, He, HG], g, atol=1e-8)
        H2 = lambda x: _h2_p_grad(x[0], x[1], x[2], x[3], 1.0, P.A_oct)[0]
        g2 = _num_grad(H2, [xi, eta, gam, Gam])
        assert np.allclose(_h2_p_grad(xi, eta, gam, Gam, 1.0, P.A_oct)[1:], g2, atol=1e-8)


def test_delaunay_and_poincare_flows_agree():
    mu = 0.01
    d = DelaunayState(1.1, 0.8, 0.4, 0.3)
    yD = np.array(delaunay_rhs([d.g1, d.G1, d.gamma, d.Gamma], mu, P.L1, P.A_oct))
    s = delaunay_to_poincare(d, P.L1)
    yP = np.array(poincare_rhs([s.xi, s.eta, s.gamma, s.Gamma], mu, P.L1, P.A_oct))
    # push the Delaunay velocity forward to the Poincare chart
    r = math.sqrt(2 * (P.L1 - d.G1))
    dr = -yD[1] / r
    xi_dot = dr * math.cos(d.g1) - r * math.sin(d.g1) * yD[0]
    eta_dot = -dr * math.sin(d.g1) - r * math.cos(d.g1) * yD[0]
    assert np.allclose([xi_dot, eta_dot, yD[2], yD[3]], yP, atol=1e-12)


def test_h2_vanishes_on_circular_orbit_and_harmonics():
    assert h2(DelaunayState(0.3, 1.0, 0.5, 0.3), P) == 0.0
    plus, conj = h2_harmonics(0.9, 0.7, 0.3, P)
    for gam in (0.0, 0.8, 2.5):
        val = 2 * (plus * complex(math.cos(gam), math.sin(gam))).real
        assert val == pytest.approx(h2(DelaunayState(0.9, 0.7, gam, 0.3), P), abs=1e-14)
    assert conj == pytest.approx(plus.conjugate())


def test_hessian_and_linear_flow():
    H = h0_poincare_hessian_origin(1.0, 0.3)
    assert np.allclose(H, np.diag([4.0, -2 * (3 - 5 * 0.09)]))
    f = lambda x, y: _h0_p_grad(x, y, 0.3, 1.0)[0]
    h = 1e-4
    num = np.array([
        [(f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / h ** 2,
         (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)],
        [0.0, (f(0, h) - 2 * f(0, 0) + f(0, -h)) / h ** 2],
    ])
    num[1, 0] = num[0, 1]
    assert np.allclose(num, H, atol=1e-5)
    J = linear_flow_matrix(1.0, 0.3)
    ev = np.sort(np.linalg.eigvals(J).real)
    assert ev[1] == pytest.approx(2 * math.sqrt(6 * (1 - 5 / 3 * 0.09)), rel=1e-14)


def test_perturbed_vector_field_dispatch_and_errors():
    s = PoincareState(0.1, -0.2, 0.3, 0.3)
    v = perturbed_vector_field(s, 0.0, P)
    assert v[3] == 0.0
    assert perturbed_vector_field(s, 0.1, P)[3] != 0.0
    with pytest.raises(DomainError):
        perturbed_vector_field(s, -1.0, P)
    e = total_energy(s, 0.1, P)
    assert e == pytest.approx(h0_poincare(s, 1.0) + 0.1 * h2_poincare(s, P), abs=1e-15)
