import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secsplit.core import (
    SQRT_3_5, DelaunayState, PoincareState, SecularParams, delaunay_to_poincare,
    derive_separatrix_constants, derive_system, eccentricity, mutual_inclination,
    poincare_to_delaunay,
)
from secsplit.errors import DomainError


def test_derive_system_reduced_masses():
    s = derive_system(1.0, 1.0, 1.0)
    assert s.M1 == 2.0 and s.M2 == 3.0
    assert s.mu1 == pytest.approx(0.5)
    assert s.mu2 == pytest.approx(2.0 / 3.0)
    assert s.sigma0 + s.sigma1 == pytest.approx(1.0)


@pytest.mark.parametrize("masses", [(0, 1, 1), (1, -1, 1), (1, 1, float("nan"))])
def test_derive_system_rejects_bad_masses(masses):
    with pytest.raises(DomainError):
        derive_system(*masses)


@pytest.mark.parametrize("L1,Gamma", [(1.0, 0.0), (1.0, -0.1), (1.0, SQRT_3_5), (1.0, 0.9), (0.0, 0.1)])
def test_params_reject_outside_admissible_set(L1, Gamma):
    with pytest.raises(DomainError):
        SecularParams(L1=L1, Gamma=Gamma)


def test_params_delta_range():
    with pytest.raises(DomainError):
        SecularParams(L1=1.0, Gamma=0.3, delta=1.0)


def test_octupole_factor_physical_and_normalized():
    p = SecularParams(L1=1.0, Gamma=0.3)
    e2 = p.e2
    expected = p.a1 ** 3 / p.a2 ** 4 * e2 / (1 - e2 ** 2) ** 2.5
    assert p.octupole_factor == pytest.approx(expected, rel=1e-15)
    assert SecularParams.normalized(1.0, 0.3).A_oct == -15.0 / 64.0


def test_separatrix_constants_reference():
    c = derive_separatrix_constants(SecularParams.normalized(1.0, 0.3))
    q = 1 - 5.0 / 3.0 * 0.09
    assert c.q == pytest.approx(q, rel=1e-15)
    assert c.A2 == pytest.approx(2 * math.sqrt(6 * q), rel=1e-15)
    assert c.chi == pytest.approx(math.sqrt(2.0 / 3.0) * 0.3 / math.sqrt(q), rel=1e-15)
    assert c.nu == pytest.approx(c.chi / 2, rel=1e-14)
    assert c.alpha == pytest.approx(math.pi * c.chi / 4, rel=1e-14)
    assert 0 < c.beta < c.alpha


def test_A2_is_linearized_eigenvalue():
    # eigenvalue of [[0, 2(3-5g^2)/L],[4/L, 0]]
    for L1, G in [(1.0, 0.3), (2.0, 0.1), (0.5, 0.35)]:
        c = derive_separatrix_constants(SecularParams.normalized(L1, G))
        g2 = (G / L1) ** 2
        assert c.A2 == pytest.approx(math.sqrt(8 * (3 - 5 * g2)) / L1, rel=1e-14)


def test_eccentricity_and_inclination():
    assert eccentricity(1.0, 1.0) == 0.0
    assert eccentricity(1.0, 0.6) == pytest.approx(0.8)
    with pytest.raises(DomainError):
        eccentricity(1.0, 1.1)
    with pytest.raises(DomainError):
        eccentricity(1.0, 0.0)
    with pytest.raises(DomainError):
        mutual_inclination(0.3, 0.5)


@settings(max_examples=200, deadline=None)
@given(G1=st.floats(1e-3, 10.0), frac=st.floats(-1.0, 1.0))
def test_inclination_on_unit_circle(G1, frac):
    c, s = mutual_inclination(G1, frac * G1)
    assert abs(c * c + s * s - 1.0) < 1e-14


@settings(max_examples=200, deadline=None)
@given(g1=st.floats(-10, 10), frac=st.floats(0.01, 0.999))
def test_chart_roundtrip(g1, frac):
    L1 = 1.3
    d = DelaunayState(g1, frac * L1, 0.2, 0.1)
    back = poincare_to_delaunay(delaunay_to_poincare(d, L1), L1)
    assert back.G1 == pytest.approx(d.G1, abs=1e-14)
    assert math.cos(back.g1 - g1) == pytest.approx(1.0, abs=1e-12)


def test_chart_origin_and_domain():
    d = poincare_to_delaunay(PoincareState(0.0, 0.0, 0.0, 0.1), 1.0)
    assert d.G1 == 1.0 and math.isnan(d.g1)
    with pytest.raises(DomainError):
        poincare_to_delaunay(PoincareState(1.5, 0.0, 0.0, 0.1), 1.0)


def test_chart_is_symplectic():
    # Jacobian of (g1, G1) -> (xi, eta) has unit determinant
    L1, g1, G1, h = 1.0, 0.7, 0.8, 1e-6
    f = lambda a, b: np.array([(s := delaunay_to_poincare(DelaunayState(a, b, 0, 0.1), L1)).xi, s.eta])
    J = np.column_stack([(f(g1 + h, G1) - f(g1 - h, G1)) / (2 * h),
                         (f(g1, G1 + h) - f(g1, G1 - h)) / (2 * h)])
    # d xi ^ d eta = d G1 ^ d g1  ->  det d(xi,eta)/d(g1,G1) = -1
    assert np.linalg.det(J) == pytest.approx(-1.0, abs=1e-8)
