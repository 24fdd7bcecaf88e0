"""Matplotlib renderings of observation tables and correlation matrices."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evolution import CorrelationMatrix, ObservationTable
from .measures import MEASURE_NAMES, SIMILARITY_MEASURES

_DPI = 150


def save_correlation_heatmap(
    matrix: CorrelationMatrix, path: Union[str, Path]
) -> None:
    """Annotated 11x11 heatmap; undefined cells are greyed out."""
    n = len(matrix.measure_names)
    data = np.full((n, n), np.nan)
    for i, row in enumerate(matrix.rho):
        for j, value in enumerate(row):
            if value is not None:
                data[i, j] = value
    fig, ax = plt.subplots(figsize=(8.0, 6.8))
    cmap = plt.get_cmap("RdBu_r").copy()
    cmap.set_bad("0.88")
    im = ax.imshow(np.ma.masked_invalid(data), vmin=-1.0, vmax=1.0, cmap=cmap)
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(matrix.measure_names, rotation=45, ha="right", fontsize=8)
    ax.set_yticklabels(matrix.measure_names, fontsize=8)
    for i in range(n):
        for j in range(n):
            value = matrix.rho[i][j]
            if value is None:
                continue
            color = "white" if abs(value) > 0.6 else "black"
            ax.text(j, i, f"{value:.2f}", ha="center", va="center",
                    fontsize=6.5, color=color)
    ax.set_title(f"Spearman rank correlation ({matrix.index_kind.value} index)")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_observation_series(
    table: ObservationTable, path: Union[str, Path]
) -> None:
    """Similarity measures on one axis, divergence measures on another."""
    labels = [row.gold_snapshot_id for row in table.rows]
    x = range(len(labels))
    fig, (ax_sim, ax_div) = plt.subplots(
        2, 1, figsize=(8.0, 7.0), sharex=True
    )
    for name in MEASURE_NAMES:
        series = table.series(name)
        ax = ax_sim if name in SIMILARITY_MEASURES else ax_div
        ax.plot(x, series, marker="o", markersize=3, linewidth=1, label=name)
    ax_sim.set_ylabel("similarity")
    ax_sim.set_ylim(-0.05, 1.05)
    ax_div.set_ylabel("divergence")
    for ax in (ax_sim, ax_div):
        ax.grid(True, linewidth=0.3, alpha=0.5)
        ax.legend(fontsize=6.5, ncol=2)
    ax_div.set_xticks(list(x))
    ax_div.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax_div.set_xlabel("gold snapshot")
    ax_sim.set_title(f"Index accuracy over snapshots ({table.index_kind.value} index)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
