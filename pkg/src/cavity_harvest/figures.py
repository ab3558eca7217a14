"""Static matplotlib renderings of sweep output.

Every CLI report path that writes delimited data can also drop PNG figures
next to it: heatmaps of each computed quantity over a 2-D grid, line plots
for 1-D sweeps, harvesting-region overlays, convergence curves, and the
periodic-vs-Dirichlet region comparison.  The Agg backend is forced so this
works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweep import QUANTITIES, ConvergenceStudy, RegionMask, SweepAxis, SweepGrid

_AXIS_LABEL = {"T": "T / r", "Omega": "detector gap", "L": "cavity length", "N": "mode cutoff"}

_QUANTITY_LABEL = {
    "E_12": "pair 1-2 negativity",
    "E_13": "pair 1-3 negativity",
    "E_23": "pair 2-3 negativity",
    "E_1_vs_23": "detector 1 vs rest",
    "E_2_vs_13": "detector 2 vs rest",
    "E_3_vs_12": "detector 3 vs rest",
    "E_tri": "tripartite estimate",
}


def _axis_label(axis: SweepAxis) -> str:
    if axis.name == "T" and axis.unit == "abs":
        return "T"
    return _AXIS_LABEL[axis.name]


def grid_heatmaps(grid: SweepGrid, base) -> list[Path]:
    """One PNG per quantity that has any data; returns the written paths."""
    base = Path(base)
    written = []
    for quantity in QUANTITIES:
        arr = grid.value_array(quantity)
        if not np.any(np.isfinite(arr)):
            continue
        path = base.with_name(f"{base.stem}_{quantity}.png")
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        if len(grid.axes) == 2:
            x = grid.axes[0].values
            y = grid.axes[1].values
            mesh = ax.pcolormesh(x, y, arr.T, shading="auto", cmap="viridis")
            fig.colorbar(mesh, ax=ax, label=_QUANTITY_LABEL[quantity])
            ax.set_ylabel(_axis_label(grid.axes[1]))
        else:
            ax.plot(grid.axes[0].values, arr, lw=1.2)
            ax.set_ylabel(_QUANTITY_LABEL[quantity])
        ax.set_xlabel(_axis_label(grid.axes[0]))
        ax.set_title(f"{_QUANTITY_LABEL[quantity]} ({grid.cells[0].boundary})")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def region_figure(mask: RegionMask, path) -> Optional[Path]:
    """Overlay of all non-empty harvesting regions on a 2-D grid."""
    if len(mask.axes) != 2:
        return None
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    x = mask.axes[0].values
    y = mask.axes[1].values
    cmap = plt.get_cmap("tab10")
    drawn = 0
    for i, quantity in enumerate(QUANTITIES):
        m = np.asarray(mask.masks[quantity])
        if not m.any():
            continue
        ax.contourf(
            x, y, m.T.astype(float), levels=[0.5, 1.5],
            colors=[cmap(i)], alpha=0.35,
        )
        ax.plot([], [], color=cmap(i), lw=4, alpha=0.6,
                label=_QUANTITY_LABEL[quantity])
        drawn += 1
    ax.set_xlabel(_axis_label(mask.axes[0]))
    ax.set_ylabel(_axis_label(mask.axes[1]))
    ax.set_title(f"harvesting regions above {mask.threshold:g}")
    if drawn:
        ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def convergence_figure(study: ConvergenceStudy, path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for quantity in QUANTITIES:
        pairs = [(n, v) for n, v in study.values_for(quantity) if v is not None]
        if not pairs:
            continue
        ns, vals = zip(*pairs)
        ax.plot(ns, vals, marker="o", ms=3.5, lw=1.0, label=_QUANTITY_LABEL[quantity])
    ax.set_xlabel("mode cutoff")
    ax.set_ylabel("logarithmic negativity")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def comparison_figure(
    mask_periodic: RegionMask, mask_dirichlet: RegionMask, quantity: str, path
) -> Optional[Path]:
    """Side-by-side region outlines for the two boundary types."""
    if len(mask_periodic.axes) != 2:
        return None
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    x = mask_periodic.axes[0].values
    y = mask_periodic.axes[1].values
    for mask, color, label in (
        (mask_periodic, "tab:blue", "periodic"),
        (mask_dirichlet, "tab:red", "Dirichlet"),
    ):
        m = np.asarray(mask.masks[quantity])
        if m.any():
            ax.contourf(x, y, m.T.astype(float), levels=[0.5, 1.5],
                        colors=[color], alpha=0.3)
        ax.plot([], [], color=color, lw=4, alpha=0.5, label=label)
    ax.set_xlabel(_axis_label(mask_periodic.axes[0]))
    ax.set_ylabel(_axis_label(mask_periodic.axes[1]))
    ax.set_title(f"{_QUANTITY_LABEL[quantity]} region by boundary type")
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
