"""Figure rendering for density and walk reports.

The CLI writes these PNGs next to the delimited reports when asked; the
data always lives in the CSV/JSON, figures are a convenience view.
"""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .density import DensityEstimate
from .walks import WalkEstimate


def density_figure(rows: Sequence[DensityEstimate], path: str) -> None:
    """Estimated event density vs state count, with 95% interval bars."""
    if not rows:
        raise ValueError("no rows to plot")
    ns = [r.n for r in rows]
    p = [r.p_hat for r in rows]
    err_lo = [r.p_hat - r.ci_lo for r in rows]
    err_hi = [r.ci_hi - r.p_hat for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(ns, p, yerr=[err_lo, err_hi], fmt="o-", capsize=3, lw=1.2)
    if max(ns) >= 20 * min(ns):
        ax.set_xscale("log")
    ax.set_xlabel("states n")
    ax.set_ylabel("estimated density")
    ax.set_title(f"{rows[0].event.token} ({rows[0].trials} trials per point)")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def walk_figure(
    points: Sequence[tuple[int, Optional[float], Optional[WalkEstimate]]],
    path: str,
) -> None:
    """Fall-off probability vs horizon: exact curve plus Monte Carlo marks."""
    if not points:
        raise ValueError("no points to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    exact_pts = [(k, v) for k, v, _ in points if v is not None]
    if exact_pts:
        ax.plot(*zip(*exact_pts), "-", lw=1.2, label="exact")
    mc_pts = [(k, est) for k, _, est in points if est is not None]
    if mc_pts:
        ks = [k for k, _ in mc_pts]
        est = [e.p_hat for _, e in mc_pts]
        lo = [e.p_hat - e.ci_lo for _, e in mc_pts]
        hi = [e.ci_hi - e.p_hat for _, e in mc_pts]
        ax.errorbar(ks, est, yerr=[lo, hi], fmt="x", capsize=3, label="Monte Carlo")
    if points[-1][0] >= 20 * max(points[0][0], 1):
        ax.set_xscale("log")
    ax.set_xlabel("horizon k (steps)")
    ax.set_ylabel("P(falls off within k)")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
