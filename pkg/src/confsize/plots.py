"""Figure rendering for the validation-grid report.

Renders the grid records that accompany the CSV output: one panel per
(m, n) cell comparing estimates against the exact expected size, plus a
containment summary for the interval bounds.  Import stays local to the
report path so library use never touches a plotting backend.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .synthetic import GridRecord

__all__ = ["render_grid_figures"]


def _panel(ax, records: list[GridRecord], gammas: Sequence[float]) -> None:
    colors = plt.cm.viridis(np.linspace(0.15, 0.75, len(gammas)))
    theo = np.array(sorted({r.theoretical for r in records}))
    lo, hi = float(theo.min()), float(theo.max())
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    ident = np.array([lo - pad, hi + pad])
    ax.plot(ident, ident, "k--", linewidth=0.8, label="exact")

    base = [r for r in records if r.gamma == gammas[0]]
    ax.scatter(
        [r.theoretical for r in base],
        [r.mc_avg for r in base],
        s=8,
        color="black",
        alpha=0.5,
        label="MC average",
    )
    ax.scatter(
        [r.theoretical for r in base],
        [r.point for r in base],
        s=8,
        color="tab:green",
        alpha=0.6,
        label="point estimate",
    )
    for gamma, color in zip(gammas, colors):
        sub = sorted(
            (r for r in records if r.gamma == gamma), key=lambda r: r.theoretical
        )
        xs = [r.theoretical for r in sub]
        ax.plot(xs, [r.lower for r in sub], color=color, linewidth=0.7,
                label=f"bounds $\\gamma$={gamma:g}")
        ax.plot(xs, [r.upper for r in sub], color=color, linewidth=0.7)
    ax.set_xscale("log")
    ax.set_yscale("log")


def render_grid_figures(records: Sequence[GridRecord], out_dir) -> list[Path]:
    """Write the estimate-vs-exact panels and the containment summary.

    Returns the paths of the files produced.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not records:
        raise ValueError("no records to plot")

    by_cell: dict[tuple, list[GridRecord]] = defaultdict(list)
    for r in records:
        by_cell[(r.m, r.n)].append(r)
    m_values = sorted({m for m, _ in by_cell})
    n_values = sorted({n for _, n in by_cell})
    gammas = sorted({r.gamma for r in records}, reverse=True)

    fig, axes = plt.subplots(
        len(m_values),
        len(n_values),
        figsize=(3.2 * len(n_values), 2.8 * len(m_values)),
        squeeze=False,
    )
    for i, m in enumerate(m_values):
        for j, n in enumerate(n_values):
            ax = axes[i][j]
            cell = by_cell.get((m, n))
            if not cell:
                ax.axis("off")
                continue
            _panel(ax, cell, gammas)
            if i == 0:
                ax.set_title(f"n = {n}", fontsize=9)
            if j == 0:
                ax.set_ylabel(f"m = {m}\nestimated size", fontsize=8)
            if i == len(m_values) - 1:
                ax.set_xlabel("exact expected size", fontsize=8)
            ax.tick_params(labelsize=7)
    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="upper center", ncol=len(labels), fontsize=8)
    fig.tight_layout(rect=(0, 0, 1, 0.94))
    sizes_path = out / "sizes_vs_exact.png"
    fig.savefig(sizes_path, dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(4.0, 3.0))
    freqs = []
    for gamma in gammas:
        sub = [r for r in records if r.gamma == gamma]
        freqs.append(sum(r.contains_truth for r in sub) / len(sub))
    bars = ax.bar([f"$\\gamma$ = {g:g}" for g in gammas], freqs, color="tab:blue", width=0.5)
    for bar, freq, gamma in zip(bars, freqs, gammas):
        ax.axhline(1.0 - gamma, color="tab:red", linewidth=0.8, linestyle=":")
        ax.text(bar.get_x() + bar.get_width() / 2, freq, f"{freq:.3f}",
                ha="center", va="bottom", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("interval contains exact size")
    fig.tight_layout()
    containment_path = out / "interval_containment.png"
    fig.savefig(containment_path, dpi=150)
    plt.close(fig)

    return [sizes_path, containment_path]
