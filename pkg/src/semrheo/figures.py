"""Matplotlib rendering of report artifacts to image files."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .msd import DiffusionReport, MsdCurve  # noqa: E402
from .projection import Projection2D  # noqa: E402


def render_msd(path: str, curve: MsdCurve, report: DiffusionReport | None = None,
               expected: np.ndarray | None = None,
               members: list[MsdCurve] | None = None,
               title: str = "") -> None:
    """Log-log MSD plot with the fitted power law and phase boundaries."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for member in members or []:
        sel = member.values > 0
        ax.plot(member.delays[sel], member.values[sel],
                color="0.8", lw=0.6, zorder=1)
    sel = curve.values > 0
    ax.plot(curve.delays[sel], curve.values[sel], "o-", ms=2.5, lw=1.0,
            color="C0", label="MSD", zorder=3)
    if expected is not None:
        pos = expected > 0
        ax.plot(curve.delays[pos], expected[pos], "k--", lw=1.2,
                label="expected", zorder=2)
    if report is not None:
        lo, hi = report.fit.window
        xs = np.geomspace(max(lo, float(curve.delays[0])),
                          min(hi, float(curve.delays[-1])), 64)
        ax.plot(xs, math.exp(report.fit.log_amplitude) * xs ** report.fit.alpha,
                "C3--", lw=1.2,
                label=rf"fit $\alpha$={report.fit.alpha:.2f}", zorder=4)
        for (w_lo, w_hi), alpha in report.segments:
            if w_lo > lo:
                ax.axvline(w_lo, color="0.5", lw=0.8, ls=":")
            ax.annotate(rf"$\alpha$={alpha:.2f}",
                        xy=(math.sqrt(w_lo * max(w_hi, w_lo + 1)), 0.05),
                        xycoords=("data", "axes fraction"),
                        ha="center", fontsize=8, color="0.3")
        if report.plateau_level is not None:
            ax.axhline(report.plateau_level, color="C2", lw=0.8, ls="--",
                       label=f"plateau {report.plateau_level:.3g}")
    ax.set(xscale="log", yscale="log", xlabel="delay", ylabel="MSD")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_projection(path: str, proj: Projection2D, title: str = "") -> None:
    """2-D scatter of projected points, colored by sequence position."""
    n = len(proj.coords)
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.plot(proj.coords[:, 0], proj.coords[:, 1], "-", color="0.7",
            lw=0.5, zorder=1)
    sc = ax.scatter(proj.coords[:, 0], proj.coords[:, 1], c=np.arange(n),
                    cmap="viridis", s=12, zorder=2)
    fig.colorbar(sc, ax=ax, label="index")
    ev = proj.explained_variance
    ax.set(xlabel=f"PC1 ({100 * ev[0]:.1f}% var)",
           ylabel=f"PC2 ({100 * ev[1]:.1f}% var)")
    ax.set_aspect("equal", adjustable="datalim")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
