"""Command-line front end: ``secsplit <command> --config run.ini --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 numeric reconciliation
failure, 4 dynamics failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import io, plotting
from .config import load_config
from .core import SQRT_3_5, derive_separatrix_constants
from .dynamics import (
    Section, Transversal, find_fixed_point, grow_manifold, measure_splitting,
)
from .errors import (
    ConfigError, DomainError, DynamicsError, QuadratureError, ReconciliationError,
)
from .hamiltonians import _h0_p
from .melnikov import (
    CANONICAL_VARIANT, ScanGrid, critical_points, melnikov_potential,
    harmonic_content, melnikov_quadrature, melnikov_value, scan_parameter_set,
)
from .separatrix import (
    IDENTITY_NAMES, asymptotic_rate, elliptic_points, elliptic_quartic_roots, fixed_points,
    periodic_orbits, separatrix_energy_residual, separatrix_identities, separatrix_residual,
    separatrix_sample,
)

log = logging.getLogger("secsplit")

EXIT_OK, EXIT_CONFIG, EXIT_RECONCILIATION, EXIT_DYNAMICS = 0, 2, 3, 4

NOT_RUN = {"status": "not run"}


def _reconciliation(mv):
    if mv is None:
        return NOT_RUN
    if mv.reconciled is None:
        return {"status": "quadrature only"}
    return {
        "status": "reconciled" if mv.reconciled else "failed",
        "canonical_variant": CANONICAL_VARIANT,
        "survivors": list(mv.survivors),
        "agreement": mv.agreement,
    }


def _path(cfg, name):
    return os.path.join(cfg.output.directory, name)


def _integrator_tolerances(cfg):
    d = cfg.dynamics
    return {"method": d.method, "rtol": d.rtol, "atol": d.atol, "step": d.step,
            "chart_switch": d.chart_switch}


# ---------------------------------------------------------------- separatrix

def cmd_separatrix(cfg, jobs=1):
    """Separatrix samples, identity residuals and the fixed-point report."""
    p = cfg.params()
    c = derive_separatrix_constants(p)
    sp = cfg.separatrix
    T = sp.t_factor / c.A2
    t = np.linspace(-T, T, sp.n_samples)
    smp = separatrix_sample(t, sp.gamma0, p)
    eres = separatrix_energy_residual(t, p)
    ham = float(np.max(separatrix_residual(t, sp.gamma0, p)))
    ids = separatrix_identities(t, p)
    meta = io.metadata(cfg, "separatrix", {"t_factor": sp.t_factor, "identity_precision": "longdouble"},
                       NOT_RUN)
    files = [io.write_csv(
        _path(cfg, "separatrix.csv"),
        ["t", "g1", "G1", "gamma", "xi", "eta", "energy_residual"],
        zip(smp.t, smp.g1, smp.G1, smp.gamma, smp.xi, smp.eta, eres), meta)]
    id_cols = list(IDENTITY_NAMES) + ["orbit_equation", "pythagoras"]
    files.append(io.write_csv(
        _path(cfg, "identities.csv"), ["t"] + id_cols,
        zip(t, *[ids[k] for k in id_cols]), meta))
    fx = fixed_points(p)
    rm, rp = asymptotic_rate(p)
    z_min, z_max = periodic_orbits(sp.gamma0, p)
    report = {
        "L1": p.L1, "Gamma": p.Gamma,
        "constants": {k: getattr(c, k) for k in ("chi", "A1", "A2", "alpha", "beta", "nu", "q",
                                                 "GammaHat", "chiHat")},
        "g1_min": fx.g1_min, "g1_max": fx.g1_max,
        "periodic_orbits": {"min": {"g1": z_min.g1, "G1": z_min.L1},
                            "max": {"g1": z_max.g1, "G1": z_max.L1}},
        "asymptotic_rate": {"minus": rm, "plus": rp, "A2": c.A2},
        "max_hamilton_residual": ham,
        "max_energy_residual": float(np.max(np.abs(eres))),
        "max_identity_residual": {k: float(np.max(np.abs(ids[k]))) for k in id_cols},
        "energy_level": -(p.Gamma / p.L1) ** 2,
    }
    if sp.random_sets > 0:
        rng = np.random.default_rng(cfg.seed)
        rows = []
        for _ in range(sp.random_sets):
            L1 = float(rng.uniform(0.5, 2.0))
            G = float(rng.uniform(0.02, 0.98)) * L1 * SQRT_3_5
            q = cfg.params(L1=L1, Gamma=G)
            cq = derive_separatrix_constants(q)
            tq = np.linspace(-10.0 / cq.A2, 10.0 / cq.A2, 100)
            rows.append((L1, G, float(np.max(separatrix_residual(tq, 0.0, q))),
                         float(np.max(np.abs(separatrix_energy_residual(tq, q))))))
        files.append(io.write_csv(_path(cfg, "random_checks.csv"),
                                  ["L1", "Gamma", "hamilton_residual", "energy_residual"], rows, meta))
        report["random_checks"] = len(rows)
    files.append(io.write_json(_path(cfg, "fixed_points.json"), report, meta))
    if cfg.output.figures:
        files.append(plotting.plot_separatrix(smp, _path(cfg, "separatrix.png")))
    print(f"separatrix: A2={c.A2:.17g} hamilton_residual={ham:.3e} "
          f"energy_residual={report['max_energy_residual']:.3e} "
          f"identity_residual={max(report['max_identity_residual'].values()):.3e}")
    return EXIT_OK, files


# ---------------------------------------------------------------- melnikov

def _value_record(mv):
    rec = {
        "L1": mv.L1, "Gamma": mv.Gamma, "L_plus": mv.L_plus, "abs": mv.abs, "arg": mv.arg,
        "quadrature_value": mv.quadrature_value, "quadrature_error": mv.quadrature_error,
        "tail_bound": mv.tail_bound, "parity_defect": mv.parity_defect,
        "agreement": mv.agreement, "variants": dict(sorted(mv.variants.items())),
        "survivors": list(mv.survivors), "reconciled": mv.reconciled,
    }
    rec["residues"] = [{"label": r.label, "pole": r.pole, "residue": r.residue}
                       for r in mv.residue_terms]
    return rec


def _quadrature_only_value(p, t_factor):
    return melnikov_quadrature(p, T_factor=t_factor)


def cmd_melnikov(cfg, jobs=1):
    """``Lplus`` by both routes at the configured cell (plus a grid if ``[scan]`` is present)."""
    p = cfg.params()
    m = cfg.melnikov
    if m.quadrature_only:
        mv = _quadrature_only_value(p, m.t_factor)
    else:
        mv = melnikov_value(p, tol=m.tol, raise_on_failure=False, T_factor=m.t_factor)
    tol = {"melnikov_tol": m.tol, "t_factor": m.t_factor, "quadrature_epsrel": 1e-13}
    meta = io.metadata(cfg, "melnikov", tol, _reconciliation(mv))
    cps = critical_points(p, L_plus=mv.L_plus)
    hc = harmonic_content(p, m.n_potential, T_factor=m.t_factor)
    g, td = hc.gamma0, hc.values
    cf = melnikov_potential(g, p, L_plus=mv.L_plus)
    payload = {
        "value": _value_record(mv),
        "critical_points": [{"gamma0": cp.gamma0, "second_derivative": cp.second_derivative,
                             "predicted": cp.predicted, "offset": cp.offset}
                            for cp in cps.points],
        "degenerate": cps.degenerate,
        "harmonic_purity": None if math.isnan(hc.purity) else hc.purity,
    }
    files = [io.write_json(_path(cfg, "melnikov.json"), payload, meta),
             io.write_csv(_path(cfg, "melnikov_potential.csv"),
                          ["gamma0", "L_time_domain", "L_closed_form"], zip(g, td, cf), meta)]
    if cfg.output.figures:
        gg = np.linspace(0.0, 2.0 * math.pi, 401)
        files.append(plotting.plot_melnikov(gg, melnikov_potential(gg, p, L_plus=mv.L_plus),
                                            (g, td), _path(cfg, "melnikov.png")))
    agree = "n/a" if mv.agreement is None else f"{mv.agreement:.3e}"
    print(f"melnikov: L1={p.L1:.17g} Gamma={p.Gamma:.17g} |L+|={mv.abs:.17g} "
          f"arg(L+)={mv.arg:.17g} agreement={agree} "
          f"reconciliation={_reconciliation(mv)['status']} survivors={','.join(mv.survivors) or '-'}")
    code = EXIT_OK if (m.quadrature_only or mv.reconciled) else EXIT_RECONCILIATION
    if cfg.has_scan:
        scode, sfiles = cmd_scan(cfg, jobs)
        files += sfiles
        code = max(code, scode)
    return code, files


def cmd_scan(cfg, jobs=1):
    """``Lplus`` over the ``[scan]`` grid."""
    s, m = cfg.scan, cfg.melnikov
    grid = ScanGrid.uniform((s.L1_min, s.L1_max), s.n_L1, (s.frac_min, s.frac_max), s.n_frac,
                            margin=s.margin)
    proto = cfg.params()
    kw = {"L2": proto.L2, "delta": proto.delta, "system": proto.system,
          "octupole_scale": proto.octupole_scale}
    scan = scan_parameter_set(grid, jobs=jobs, quadrature_only=m.quadrature_only, tol=m.tol,
                              param_kwargs=kw, T_factor=m.t_factor)
    fails = scan.failures
    if m.quadrature_only:
        rec = {"status": "quadrature only"}
    else:
        surv = sorted({v for c in scan.cells if c.value is not None for v in c.value.survivors})
        rec = {"status": "failed" if fails else "reconciled", "canonical_variant": CANONICAL_VARIANT,
               "survivors": surv, "failed_cells": [[c.L1, c.Gamma] for c in fails]}
    tol = {"melnikov_tol": m.tol, "t_factor": m.t_factor, "zero_threshold": scan.threshold}
    meta = io.metadata(cfg, "scan", tol, rec)
    rows = []
    for c in scan.cells:
        v = c.value
        rows.append((c.L1, c.Gamma, v.abs if v else math.nan, v.arg if v else math.nan,
                     v.agreement if (v and v.agreement is not None) else math.nan, c.flag))
    files = [io.write_csv(_path(cfg, "scan.csv"),
                          ["L1", "Gamma", "abs_Lplus", "arg_Lplus", "agreement", "flag"], rows, meta)]
    cells = [{"L1": c.L1, "Gamma": c.Gamma, "flag": c.flag, "message": c.message,
              "value": _value_record(c.value) if c.value else None} for c in scan.cells]
    files.append(io.write_json(_path(cfg, "scan.json"), {"cells": cells}, meta))
    if cfg.output.figures:
        A = np.array([r[2] for r in rows]).reshape(len(grid.L1_values), len(grid.gamma_fractions))
        files.append(plotting.plot_scan(np.array(grid.L1_values), np.array(grid.gamma_fractions),
                                        A, _path(cfg, "scan.png")))
    for c in fails:
        print(f"scan: cell L1={c.L1:.17g} Gamma={c.Gamma:.17g} flag={c.flag} {c.message}")
    worst = max((r[4] for r in rows if not math.isnan(r[4])), default=math.nan)
    print(f"scan: {len(rows)} cells, {len(fails)} failures, "
          f"{len(scan.candidate_zeros)} candidate zeros, worst agreement={worst:.3e}")
    return (EXIT_RECONCILIATION if fails else EXIT_OK), files


# ---------------------------------------------------------------- splitting

def cmd_splitting(cfg, jobs=1):
    """Measured splitting, certificates and manifold polylines."""
    p = cfg.params()
    d = cfg.dynamics
    icfg = cfg.integrator()
    tv = Transversal(d.transversal_phi)
    mv = melnikov_value(p, tol=cfg.melnikov.tol, raise_on_failure=False)
    rep = measure_splitting(p, list(d.mu), gamma_ref=d.gamma_ref, n_legs=d.n_legs, s0=d.s0,
                            n_grid=d.n_grid, transversal=tv, config=icfg,
                            threshold=d.threshold, noise_floor=d.noise_floor, jobs=jobs)
    tol = dict(_integrator_tolerances(cfg), threshold=d.threshold, noise_floor=d.noise_floor,
               s0=d.s0, n_legs=d.n_legs)
    meta = io.metadata(cfg, "splitting", tol, _reconciliation(mv))
    payload = rep.to_dict()
    payload["certificate_rule"] = "min |dGamma'(zero)| > threshold * 2 mu |Lplus|"
    files = [io.write_json(_path(cfg, "splitting.json"), payload, meta)]
    rows = []
    for r, c in zip(rep.results, rep.certificates):
        off = max((z.offset for z in r.zeros), default=math.nan)
        rows.append((r.mu, r.max_abs_d, r.max_abs_d_Gamma, r.amplitude_ratio, len(r.zeros), off,
                     r.fixed_point_offset, c.verdict, c.margin))
    files.append(io.write_csv(
        _path(cfg, "splitting.csv"),
        ["mu", "max_abs_d", "max_abs_d_Gamma", "amplitude_ratio", "n_zeros", "max_zero_offset",
         "fixed_point_offset", "verdict", "margin"], rows, meta))
    curve_rows = [(r.mu, g, a, b, c) for r in rep.results
                  for g, a, b, c in zip(r.gamma, r.d, r.d_Gamma, r.predicted_d_Gamma)]
    files.append(io.write_csv(_path(cfg, "splitting_curves.csv"),
                              ["mu", "gamma", "d", "d_Gamma", "predicted_d_Gamma"], curve_rows, meta))
    curves = []
    if d.manifolds:
        mu_m = max(d.mu)
        fp = find_fixed_point(Section(p, d.gamma_ref), mu_m, icfg, n_legs=d.n_legs)
        mrows = []
        for branch in ("unstable", "stable"):
            cv = grow_manifold(fp, p, branch, s0=d.s0, resolution=d.manifold_resolution, config=icfg)
            curves.append(cv)
            s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(cv.points, axis=0).T))])
            mrows += [(branch, si, x, y) for si, (x, y) in zip(s, cv.points)]
        mmeta = dict(meta, mu=mu_m, gamma_section=d.gamma_ref)
        files.append(io.write_csv(_path(cfg, "manifolds.csv"), ["branch", "s", "xi", "eta"], mrows,
                                  mmeta))
    if cfg.output.figures:
        files.append(plotting.plot_splitting(rep, curves, _path(cfg, "splitting.png")))
    for row in rows:
        print(f"splitting: mu={row[0]:.6g} max|d|={row[1]:.3e} zeros={row[4]} "
              f"verdict={row[7]} margin={row[8]:.3g}")
    print(f"splitting: log-log slope={rep.slope:.6g} R2={rep.slope_r2:.6g}")
    return EXIT_OK, files


# ---------------------------------------------------------------- portrait

def cmd_portrait(cfg, jobs=1):
    """Level-set grids of ``H0`` in both charts with the equilibria."""
    p = cfg.params()
    pc = cfg.portrait
    L, G = p.L1, p.Gamma
    level = -(G / L) ** 2
    g1 = np.linspace(0.0, math.pi, pc.n_g1)
    G1 = np.linspace(G, L, pc.n_G1)
    gg, GG = np.meshgrid(g1, G1)
    Hd = (1.0 - GG ** 2 / L ** 2) * (2.0 - 5.0 * (1.0 - G ** 2 / GG ** 2) * np.sin(gg) ** 2) + level
    rmax = math.sqrt(2.0 * (L - G))
    xi = np.linspace(-rmax, rmax, pc.n_xi)
    XX, EE = np.meshgrid(xi, xi)
    inside = XX ** 2 + EE ** 2 <= rmax ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        Hp = np.where(inside, _h0_p(XX, EE, G, L), np.nan)
    fx = fixed_points(p)
    ell = elliptic_points(p)
    roots = elliptic_quartic_roots(L, G)
    eq = {"hyperbolic": [(fx.g1_min, L), (fx.g1_max, L)],
          "elliptic": [(a, b) for a, b in ell if a <= math.pi]}
    meta = io.metadata(cfg, "portrait", {"grid": [pc.n_g1, pc.n_G1, pc.n_xi]}, NOT_RUN)
    meta["separatrix_level"] = level
    meta["quartic_roots_real"] = bool(np.any(np.abs(roots.imag) < 1e-12))
    files = [
        io.write_csv(_path(cfg, "portrait_delaunay.csv"), ["g1", "G1", "H0"],
                     zip(gg.ravel(), GG.ravel(), Hd.ravel()), meta),
        io.write_csv(_path(cfg, "portrait_poincare.csv"), ["xi", "eta", "H0"],
                     zip(XX.ravel(), EE.ravel(), Hp.ravel()), meta),
    ]
    erows = []
    for kind, pts in eq.items():
        for a, b in pts:
            r = math.sqrt(max(2.0 * (L - b), 0.0))
            erows.append((kind, a, b, r * math.cos(a), -r * math.sin(a)))
    erows.append(("circular", math.nan, L, 0.0, 0.0))
    files.append(io.write_csv(_path(cfg, "equilibria.csv"), ["kind", "g1", "G1", "xi", "eta"],
                              erows, meta))
    if cfg.output.figures:
        files.append(plotting.plot_portrait(g1, G1, Hd, xi, xi, Hp, level, eq,
                                            _path(cfg, "portrait.png")))
    print(f"portrait: level={level:.17g} H0 range=[{np.nanmin(Hd):.6g}, {np.nanmax(Hd):.6g}] "
          f"equilibria={len(erows)}")
    return EXIT_OK, files


COMMANDS = {
    "separatrix": cmd_separatrix,
    "melnikov": cmd_melnikov,
    "splitting": cmd_splitting,
    "portrait": cmd_portrait,
    "scan": cmd_scan,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="secsplit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", metavar="PATH", help="INI configuration file")
    ap.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    ap.add_argument("--quadrature-only", action="store_true", help="skip the residue route")
    ap.add_argument("--seed", type=int, help="seed for randomized test-point sampling")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg = cfg.with_output(args.out)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.quadrature_only:
            cfg = cfg.with_quadrature_only()
        if args.jobs < 1:
            raise ConfigError("constraint violated: --jobs >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        code, files = COMMANDS[args.command](cfg, jobs=args.jobs)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ReconciliationError, QuadratureError) as exc:
        print(f"reconciliation failure: {exc}", file=sys.stderr)
        return EXIT_RECONCILIATION
    except DynamicsError as exc:
        hint = getattr(exc, "hint", None)
        print(f"dynamics failure: {exc}" + (f" (hint: {hint})" if hint else ""), file=sys.stderr)
        return EXIT_DYNAMICS
    for f in files:
        log.info("wrote %s", f)
    return code


if __name__ == "__main__":
    sys.exit(main())
