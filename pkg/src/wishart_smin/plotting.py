"""Figure rendering for the report command (files only, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .grid import GridDensity  # noqa: E402

__all__ = ["plot_densities", "plot_panels"]

_STYLES = ["-", "--", ":", "-."]


def _draw(ax, curves: dict, hist: GridDensity | None, xlabel: str, ylabel: str, title: str):
    if hist is not None:
        edges = np.asarray(hist.metadata.get("edges", []))
        if edges.size == hist.xs.size + 1:
            ax.stairs(hist.ys, edges, fill=True, alpha=0.3, color="0.5", label=hist.metadata.get("label", "sample"))
        else:
            ax.plot(hist.xs, hist.ys, "o", ms=3, color="0.3", label=hist.metadata.get("label", "sample"))
    for i, (label, (xs, ys)) in enumerate(curves.items()):
        ax.plot(xs, ys, _STYLES[i % len(_STYLES)], lw=1.4, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8, frameon=False)


def plot_densities(
    path,
    curves: dict,
    hist: GridDensity | None = None,
    xlabel: str = "x",
    ylabel: str = "density",
    title: str = "",
) -> Path:
    """One panel: named ``(xs, ys)`` curves over an optional histogram."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    _draw(ax, curves, hist, xlabel, ylabel, title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_panels(path, panels: list, ncols: int = 3) -> Path:
    """Several panels; each entry is a dict of ``plot_densities`` keyword arguments."""
    path = Path(path)
    nrows = -(-len(panels) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.0 * ncols, 3.2 * nrows), squeeze=False)
    for ax, panel in zip(axes.ravel(), panels):
        _draw(
            ax,
            panel["curves"],
            panel.get("hist"),
            panel.get("xlabel", "x"),
            panel.get("ylabel", "density"),
            panel.get("title", ""),
        )
    for ax in axes.ravel()[len(panels):]:
        ax.set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
