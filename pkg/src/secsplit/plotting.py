"""Figures for the CLI report path (non-interactive Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# Fixed PNG metadata keeps repeated renders byte-identical.
_SAVE = {"dpi": 120, "metadata": {"Software": None}}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def plot_separatrix(sample, path):
    fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
    a.plot(sample.xi, sample.eta, lw=1.2)
    a.plot(sample.xi, -sample.eta, lw=1.2, ls="--", color="C0")
    a.plot([0], [0], "ko", ms=4)
    a.set_xlabel(r"$\xi$")
    a.set_ylabel(r"$\eta$")
    a.set_title("heteroclinic orbit (Poincare chart)")
    a.set_aspect("equal", adjustable="datalim")
    b.plot(sample.t, sample.cos_g1, label=r"$\cos g_1$")
    b.plot(sample.t, sample.G1, label=r"$G_1$")
    b.set_xlabel("t")
    b.legend()
    return _save(fig, path)


def plot_melnikov(gamma, closed, sampled, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(gamma, closed, label="closed form")
    ax.plot(np.asarray(sampled[0]), np.asarray(sampled[1]), "o", ms=4, label="time-domain quadrature")
    ax.set_xlabel(r"$\gamma_0$")
    ax.set_ylabel(r"$\mathcal{L}(\gamma_0)$")
    ax.legend()
    return _save(fig, path)


def plot_scan(L1_values, fractions, abs_values, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    Z = np.log10(np.maximum(abs_values, 1e-300))
    m = ax.pcolormesh(fractions, L1_values, Z, shading="nearest")
    fig.colorbar(m, ax=ax, label=r"$\log_{10}|\mathcal{L}^+|$")
    ax.set_xlabel(r"$\Gamma / (L_1\sqrt{3/5})$")
    ax.set_ylabel(r"$L_1$")
    return _save(fig, path)


def plot_splitting(report, curves, path):
    fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4))
    for r in report.results:
        if r.mu > 0:
            a.plot(r.gamma, r.d_Gamma / r.mu, label=f"mu={r.mu:g}")
    pos = [r for r in report.results if r.mu > 0]
    if pos:
        a.plot(pos[0].gamma, pos[0].predicted_d_Gamma / pos[0].mu, "k--", lw=1, label="-L'")
    a.set_xlabel(r"$\gamma$")
    a.set_ylabel(r"$\Delta\Gamma / \mu$")
    a.legend(fontsize=8)
    for c in curves:
        b.plot(c.points[:, 0], c.points[:, 1], lw=1, label=c.branch)
    b.axvline(0.0, color="k", lw=0.5)
    b.set_xlabel(r"$\xi$")
    b.set_ylabel(r"$\eta$")
    if curves:
        b.legend(fontsize=8)
    return _save(fig, path)


def plot_portrait(g1, G1, H_delaunay, xi, eta, H_poincare, level, equilibria, path):
    fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5))
    a.contour(g1, G1, H_delaunay, levels=30, linewidths=0.6)
    a.contour(g1, G1, H_delaunay, levels=[level], colors="r", linewidths=1.2)
    for name, pts in equilibria.items():
        if pts:
            arr = np.asarray(pts)
            a.plot(arr[:, 0], arr[:, 1], "o" if name == "elliptic" else "x", ms=6, label=name)
    a.set_xlabel(r"$g_1$")
    a.set_ylabel(r"$G_1$")
    a.legend(fontsize=8)
    b.contour(xi, eta, H_poincare, levels=30, linewidths=0.6)
    b.contour(xi, eta, H_poincare, levels=[level], colors="r", linewidths=1.2)
    b.set_xlabel(r"$\xi$")
    b.set_ylabel(r"$\eta$")
    b.set_aspect("equal")
    return _save(fig, path)
