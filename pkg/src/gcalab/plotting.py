"""Figures written next to the CLI's delimited output. Uses the Agg backend only."""

from __future__ import annotations

from math import sqrt
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (sqrt(5.0) - 1.0) / 2.0

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def figsize(width=5.0, ratio=GOLDEN):
    return (width, width * ratio)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_raster(raster, path, title=None):
    """Space-time diagram: time runs down, 0 white, 1 black."""
    raster = np.asarray(raster)
    with plt.rc_context(STYLE):
        h, w = raster.shape
        fig, ax = plt.subplots(figsize=figsize(5.0, h / max(w, 1)))
        ax.imshow(raster, cmap="Greys", interpolation="nearest", vmin=0, vmax=max(1, raster.max()))
        ax.set_xlabel("cell")
        ax.set_ylabel("step")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_mirror_pair(raster, mirrored, path, rule, mirror_rule):
    """Rule and its mirror side by side; the mirror is run on the reversed initial row."""
    with plt.rc_context(STYLE):
        h, w = np.asarray(raster).shape
        fig, axes = plt.subplots(1, 2, figsize=figsize(7.0, 0.5 * h / max(w, 1)), sharey=True)
        for ax, r, name in zip(axes, (raster, mirrored), (f"rule {rule}", f"rule {mirror_rule} (mirror)")):
            ax.imshow(r, cmap="Greys", interpolation="nearest", vmin=0, vmax=1)
            ax.set_title(name)
            ax.set_xlabel("cell")
        axes[0].set_ylabel("step")
        return _save(fig, path)


def plot_catalog_counts(rows, path, title=None):
    """Bar chart of monoid sizes; ``rows`` are ``(label, size, units)`` triples."""
    labels = [r[0] for r in rows]
    sizes = np.array([r[1] for r in rows], dtype=float)
    units = np.array([r[2] for r in rows], dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(5.0))
        x = np.arange(len(rows))
        ax.bar(x - 0.2, sizes, width=0.4, label="members", color="0.3")
        ax.bar(x + 0.2, units, width=0.4, label="units", color="0.7")
        ax.set_xticks(x)
        ax.set_xticklabels(labels, rotation=30, ha="right")
        ax.set_yscale("log")
        ax.set_ylabel("count")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)
