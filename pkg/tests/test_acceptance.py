"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL`` line (collected again in the
pytest terminal summary).  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import filecmp
import math
import os
import time

import numpy as np
import pytest
from scipy.linalg import expm

from secsplit import io
from secsplit.cli import main
from secsplit.core import SQRT_3_5, SecularParams, derive_separatrix_constants
from secsplit.dynamics import Section, find_fixed_point, measure_splitting, splitting_at
from secsplit.hamiltonians import linear_flow_matrix
from secsplit.melnikov import (
    CANONICAL_VARIANT, ScanGrid, closed_form_lplus, critical_points, harmonic_content,
    scan_parameter_set,
)
from secsplit.melnikov import _angle_dist
from secsplit.separatrix import (
    IDENTITY_NAMES, asymptotic_rate, fixed_points, separatrix_energy_residual,
    separatrix_identities, separatrix_residual, separatrix_sample,
)

RESULTS = []


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok


def sample_O(n, seed):
    rng = np.random.default_rng(seed)
    L1 = rng.uniform(0.5, 2.0, n)
    f = rng.uniform(0.02, 0.98, n)
    return [SecularParams.normalized(a, b * a * SQRT_3_5) for a, b in zip(L1, f)]


def test_c01_separatrix_exactness():
    tic = time.perf_counter()
    res = en = 0.0
    for p in sample_O(10, seed=1):
        A2 = derive_separatrix_constants(p).A2
        t = np.linspace(-10.0, 10.0, 100) / A2
        res = max(res, float(np.max(separatrix_residual(t, 0.3, p))))
        en = max(en, float(np.max(np.abs(separatrix_energy_residual(t, p)))))
    dt = time.perf_counter() - tic
    ok = res < 1e-9 and en < 1e-12 and dt < 5.0
    assert report(1, ok, f"residual {res:.2e}, energy {en:.2e}, {dt:.2f}s")


def test_c02_identity_suite():
    worst = {}
    for p in sample_O(10, seed=2):
        A2 = derive_separatrix_constants(p).A2
        ids = separatrix_identities(np.linspace(-10.0, 10.0, 201) / A2, p)
        for k in list(IDENTITY_NAMES) + ["pythagoras", "orbit_equation"]:
            worst[k] = max(worst.get(k, 0.0), float(np.max(np.abs(ids[k]))))
    ok = max(worst.values()) < 1e-12
    assert report(2, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_c03_asymptotics():
    devs, rate_err = [], 0.0
    for p in sample_O(5, seed=3) + [SecularParams.normalized(1.0, 0.3)]:
        c = derive_separatrix_constants(p)
        fx = fixed_points(p)
        T = 30.0 / c.A2
        s = separatrix_sample(np.array([-T, T]), 0.0, p)
        devs += [abs(s.G1[0] - p.L1), abs(s.G1[1] - p.L1),
                 abs(s.g1[0] - fx.g1_max), abs(s.g1[1] - fx.g1_min)]
        rate_err = max(rate_err, *(abs(r / c.A2 - 1.0) for r in asymptotic_rate(p, T_factor=30.0)))
    ok = max(devs) < 1e-9 and rate_err < 0.02
    assert report(3, ok, f"endpoint deviation {max(devs):.1e}, rate error {rate_err:.2e}")


def test_c04_dual_route_agreement():
    tic = time.perf_counter()
    grid = ScanGrid.uniform((0.5, 2.0), 20, (0.02, 0.98), 20)
    scan = scan_parameter_set(grid, jobs=min(4, os.cpu_count() or 1))
    dt = time.perf_counter() - tic
    worst = max(c.value.agreement for c in scan.cells if c.value is not None)
    ok = not scan.failures and len(scan.cells) == 400 and worst <= 1e-8 and dt < 60.0
    assert report(4, ok, f"{len(scan.cells)} cells, {len(scan.failures)} failures, "
                         f"worst relative {worst:.2e}, survivor {CANONICAL_VARIANT}, {dt:.1f}s")


def test_c05_harmonic_purity():
    purity = max(harmonic_content(p, 32).purity
                 for p in [SecularParams.normalized(1.0, 0.3)] + sample_O(3, seed=5))
    assert report(5, purity < 1e-10, f"largest other harmonic {purity:.2e} relative")


def test_c06_critical_points():
    cells = ScanGrid.uniform((0.5, 2.0), 4, (0.05, 0.95), 4).cells()
    worst, bad = 0.0, []
    for L1, G in cells:
        p = SecularParams.normalized(L1, G)
        if abs(closed_form_lplus(p)) <= 1e-10:
            continue
        res = critical_points(p)
        pts = res.points
        if len(pts) != 2 or pts[0].second_derivative * pts[1].second_derivative >= 0:
            bad.append((L1, G))
            continue
        worst = max(worst, *(cp.offset for cp in pts))
    ok = not bad and worst < 1e-10
    assert report(6, ok, f"{len(cells)} cells, {len(bad)} degenerate, worst offset {worst:.1e}")


def test_c07_integrable_limit():
    p = SecularParams.normalized(1.0, 0.3)
    fp = find_fixed_point(Section(p, 0.0), 0.0)
    E = expm(linear_flow_matrix(p.L1, p.Gamma) * fp.return_time)
    rel = float(np.max(np.abs(fp.monodromy - E)) / np.max(np.abs(E)))
    sep = splitting_at(p, 0.0, fp=fp)
    off = float(np.max(np.abs(fp.points)))
    ok = off < 1e-12 and rel < 1e-4 and sep.max_abs_d < 1e-8
    assert report(7, ok, f"fixed point {off:.1e}, linearization {rel:.1e}, "
                         f"separation {sep.max_abs_d:.1e}")


def test_c08_splitting_vs_melnikov():
    tic = time.perf_counter()
    p = SecularParams.normalized(1.0, 0.3)
    mus = (1e-4, 3e-4, 1e-3)
    rep = measure_splitting(p, mus, jobs=min(3, os.cpu_count() or 1))
    crit = [cp.gamma0 for cp in critical_points(p).points]
    dt = time.perf_counter() - tic
    offs = []
    for r in rep.results:
        if len(r.d_zeros) != len(crit):
            offs.append(math.inf)
        for z in r.d_zeros:
            offs.append(min(_angle_dist(z, c) for c in crit) / r.mu)
    verdicts = [c.verdict for c in rep.certificates]
    ok = (max(offs) <= 5.0 and abs(rep.slope - 1.0) <= 0.15
          and all(v == "granted" for v in verdicts) and dt < 600.0)
    assert report(8, ok, f"worst zero offset {max(offs):.2e}*mu, slope {rep.slope:.4f}, "
                         f"certificates {verdicts}, {dt:.0f}s")


@pytest.mark.xfail(strict=True, reason="criterion unattainable with dimensionally consistent "
                                       "A2; see the decisions ledger")
def test_c09_small_gamma_trend():
    gammas = (0.05, 0.1, 0.15, 0.2)
    ps = [SecularParams.normalized(1.0, g) for g in gammas]
    logs = np.log([abs(closed_form_lplus(p)) for p in ps])
    beta = np.array([derive_separatrix_constants(p).beta for p in ps])
    monotone = bool(np.all(np.diff(logs) < 0) or np.all(np.diff(logs) > 0))
    ratios = np.diff(logs) / (-2.0 * np.diff(beta))
    ok = monotone and bool(np.all(np.abs(ratios - 1.0) <= 0.10))
    assert report(9, ok, f"monotone={monotone}, ratios to the exp(-2 beta) rate "
                         f"{np.array2string(ratios, precision=3)}")


def test_c10_determinism_and_logging(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[scan]\nn_L1 = 3\nn_frac = 3\n[dynamics]\nmu = 0, 1e-3\nn_grid = 64\n")
    same, codes = {}, []
    for cmd in ("separatrix", "melnikov", "scan", "portrait", "splitting"):
        a, b = tmp_path / cmd / "a", tmp_path / cmd / "b"
        codes.append(main([cmd, "--config", str(cfg), "--out", str(a)]))
        codes.append(main([cmd, "--config", str(cfg), "--out", str(b), "--jobs", "2"]))
        names = sorted(os.listdir(a))
        _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        same[cmd] = bool(names) and names == sorted(os.listdir(b)) and not mismatch and not errors
    mel = tmp_path / "melnikov" / "a"
    logged = []
    for name in os.listdir(mel):
        if name.endswith(".json"):
            meta = io.read_json(str(mel / name))["metadata"]
        elif name.endswith(".csv"):
            meta = io.read_csv(str(mel / name))[0]
        else:
            continue
        logged.append(CANONICAL_VARIANT in meta["reconciliation"].get("survivors", []))
    ok = all(same.values()) and set(codes) == {0} and logged and all(logged)
    assert report(10, ok, f"identical {same}, melnikov files logging survivor "
                          f"{sum(logged)}/{len(logged)}")
