import cmath
import math

import numpy as np
import pytest

from secsplit.core import SQRT_3_5, SecularParams, derive_separatrix_constants
from secsplit.errors import DomainError, ReconciliationError
from secsplit.melnikov import (
    CANONICAL_VARIANT, ScanGrid, closed_form_lplus, closed_form_variants, critical_points,
    harmonic_content, melnikov_potential, melnikov_potential_time_domain, melnikov_quadrature,
    melnikov_residues, melnikov_value, scan_parameter_set,
)

REF_LPLUS = 0.23042649630290885j


def test_reference_value(p_ref):
    mv = melnikov_value(p_ref)
    assert mv.reconciled and mv.survivors == [CANONICAL_VARIANT]
    assert mv.L_plus == pytest.approx(REF_LPLUS, rel=1e-12)
    assert abs(mv.quadrature_value - REF_LPLUS) < 1e-9 * abs(REF_LPLUS)
    assert mv.parity_defect < 1e-10 and mv.tail_bound < 1e-12


def test_closed_form_against_independent_oracle(oracles):
    for case in oracles["cases"]:
        p = SecularParams.normalized(case["L1"], case["Gamma"])
        Lp = closed_form_lplus(p)
        ref = complex(*case["L_plus"])
        assert abs(Lp - ref) < 1e-9 * abs(ref), (case["L1"], case["Gamma"])


def test_lplus_is_purely_imaginary():
    for L1, f in [(0.6, 0.1), (1.0, 0.5), (1.8, 0.9)]:
        Lp = closed_form_lplus(SecularParams.normalized(L1, f * L1 * SQRT_3_5))
        assert abs(Lp.real) < 1e-14 * abs(Lp)


def test_potential_is_a_single_harmonic(p_ref):
    hc = harmonic_content(p_ref, 32)
    assert hc.purity < 1e-10
    cf = melnikov_potential(hc.gamma0, p_ref)
    assert np.max(np.abs(cf - hc.values)) < 1e-10 * np.max(np.abs(cf))
    assert hc.coefficients[1] == pytest.approx(closed_form_lplus(p_ref), rel=1e-9)


def test_potential_derivative_by_quadrature(p_ref):
    g, h = 0.7, 1e-5
    fd = (melnikov_potential_time_domain(g + h, p_ref)
          - melnikov_potential_time_domain(g - h, p_ref)) / (2 * h)
    assert melnikov_potential_time_domain(g, p_ref, derivative=1) == pytest.approx(fd, rel=1e-7)


def test_critical_points_are_nondegenerate(p_ref):
    res = critical_points(p_ref)
    assert not res.degenerate and len(res.points) == 2
    a, b = res.points
    assert a.second_derivative * b.second_derivative < 0
    assert max(a.offset, b.offset) < 1e-10
    phase = -cmath.phase(res.L_plus) % math.pi
    assert a.gamma0 % math.pi == pytest.approx(phase, abs=1e-10)


def test_zero_potential_is_degenerate(p_ref):
    assert critical_points(p_ref, L_plus=0j).degenerate


def test_reconciliation_records_every_candidate(p_ref):
    mv = melnikov_residues(p_ref)
    assert set(mv.variants) == set(closed_form_variants(p_ref))
    assert mv.variants[CANONICAL_VARIANT] < 1e-10
    assert all(v > 1e-3 for k, v in mv.variants.items() if k != CANONICAL_VARIANT)


def test_reconciliation_failure_raises(p_ref):
    q = melnikov_quadrature(p_ref)
    q.quadrature_value = q.quadrature_value * (1 + 1e-6)
    with pytest.raises(ReconciliationError):
        melnikov_residues(p_ref, quadrature=q)
    mv = melnikov_residues(p_ref, quadrature=q, raise_on_failure=False)
    assert mv.reconciled is False


def test_quadrature_only_skips_residues(p_ref):
    mv = melnikov_value(p_ref, quadrature_only=True)
    assert mv.reconciled is None and mv.residue_terms == []


def test_linear_in_octupole_scale():
    a = closed_form_lplus(SecularParams.normalized(1.0, 0.3))
    b = closed_form_lplus(SecularParams(L1=1.0, Gamma=0.3, octupole_scale=2.0))
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_scan_small_grid_in_order():
    grid = ScanGrid.uniform((0.5, 2.0), 3, (0.02, 0.98), 3)
    scan = scan_parameter_set(grid)
    assert [(c.L1, c.Gamma) for c in scan.cells] == grid.cells()
    assert not scan.failures
    assert all(c.value.agreement < 1e-8 for c in scan.cells)


def test_scan_parallel_matches_serial():
    grid = ScanGrid.uniform((0.8, 1.2), 2, (0.2, 0.6), 2)
    a = scan_parameter_set(grid, jobs=1)
    b = scan_parameter_set(grid, jobs=2)
    assert [c.value.L_plus for c in a.cells] == [c.value.L_plus for c in b.cells]


def test_scan_rejects_cells_outside_margin():
    with pytest.raises(DomainError):
        ScanGrid((1.0,), (0.0005,), margin=1e-3).cells()


def test_residue_rate_is_small_gamma_order():
    # the exponential factor exp(-pi nu / 2) stays close to one as Gamma -> 0
    for G in (0.05, 0.1, 0.2):
        p = SecularParams.normalized(1.0, G)
        c = derive_separatrix_constants(p)
        nu = 2 * G / (c.A2 * p.L1 ** 2)
        assert nu == pytest.approx(c.chi / 2, rel=1e-14)
