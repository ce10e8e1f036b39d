"""Matplotlib renderers for the four standard figure kinds.

Supported kinds: an amplitude sweep curve, an operating-point scatter with
(n, m) labels, an amplitude/wait-time heatmap with the above-threshold
region outlined, and noise-degradation curves.  Axis values are plotted in
the units the file carries; no conversion happens in this layer.

Rendering is deterministic: software-only backend, fixed layout, and no
timestamps or library version strings in the output, so identical inputs
give byte-identical images.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")  # file output only, decided before pyplot loads
matplotlib.rcParams["svg.hashsalt"] = "nvsync-figs"  # stable element ids

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from .tables import SchemaError, Table, read_table, require_columns

KINDS = ("b1_sweep", "sync_scatter", "grid_heatmap", "noise_curves")

# Marked-region convention: red outlines the cells above threshold.
THRESHOLD_COLOR = "red"

_REQUIRED = {
    "b1_sweep": ("b1_MHz", "F_avg"),
    "sync_scatter": ("n", "m", "b1_MHz", "tg_us", "F_avg", "exact"),
    "grid_heatmap": ("b1_MHz", "tw_us", "F_avg", "above_threshold"),
    "noise_curves": ("b1_MHz", "t2star_us", "F_avg"),
}


@dataclass(frozen=True)
class FigureRecipe:
    """Everything needed to turn output files into one image.

    ``inputs`` is one CSV path per curve for ``b1_sweep`` and exactly one
    path for the other kinds.  ``output`` must end in ``.png`` or ``.svg``.
    """

    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    threshold: float = 0.99
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        paths = (self.inputs,) if isinstance(self.inputs, (str, os.PathLike)) else tuple(self.inputs)
        object.__setattr__(self, "inputs", paths)
        if not paths:
            raise ValueError("at least one input file is required")
        if self.kind != "b1_sweep" and len(paths) != 1:
            raise ValueError(f"{self.kind} takes exactly one input file")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly between 0 and 1")
        if self.dpi <= 0:
            raise ValueError("dpi must be positive")


def render(recipe: FigureRecipe) -> str:
    """Render the recipe and write the image; returns the output path."""
    fig = build_figure(recipe)
    try:
        _save(fig, recipe)
    finally:
        plt.close(fig)
    return recipe.output


def build_figure(recipe: FigureRecipe):
    """Build the figure without saving it (the axes stay inspectable)."""
    tables = [read_table(p) for p in recipe.inputs]
    for path, table in zip(recipe.inputs, tables):
        require_columns(table, _REQUIRED[recipe.kind], path)

    fig, ax = plt.subplots(figsize=(6.4, 4.4), layout="constrained")
    try:
        _DRAW[recipe.kind](fig, ax, tables, recipe)
        if recipe.title:
            ax.set_title(recipe.title)
    except Exception:
        plt.close(fig)
        raise
    return fig


def _save(fig, recipe: FigureRecipe) -> None:
    ext = os.path.splitext(recipe.output)[1].lower()
    if ext == ".png":
        # dropping the Software chunk keeps bytes stable across patch releases
        fig.savefig(recipe.output, dpi=recipe.dpi, metadata={"Software": None})
    elif ext == ".svg":
        fig.savefig(recipe.output, metadata={"Date": None})
    else:
        raise ValueError(f"unsupported image format {ext or recipe.output!r} (use .png or .svg)")


def _draw_b1_sweep(fig, ax, tables, recipe) -> None:
    for table in tables:
        label = table.metadata.get("policy")
        ax.plot(table.floats("b1_MHz"), table.floats("F_avg"), lw=1.2, label=label)
    ax.axhline(recipe.threshold, color=THRESHOLD_COLOR, ls="--", lw=0.8)
    ax.set_ylim(0.0, 1.02)
    ax.set_xlabel(recipe.xlabel or "drive amplitude B1 (MHz)")
    ax.set_ylabel(recipe.ylabel or "average gate fidelity")
    if len(tables) > 1:
        ax.legend(loc="lower left", fontsize=9)


def _draw_sync_scatter(fig, ax, tables, recipe) -> None:
    table = tables[0]
    b1 = table.floats("b1_MHz")
    tg = table.floats("tg_us")
    exact = table.flags("exact")

    ax.scatter(b1[~exact], tg[~exact], s=28, facecolors="none",
               edgecolors="tab:gray", label="searched")
    ax.scatter(b1[exact], tg[exact], s=30, color="tab:blue", zorder=3, label="exact")
    for n, m, x, y in zip(table.column("n"), table.column("m"), b1, tg):
        if n and m:
            ax.annotate(f"({n},{m})", (x, y), textcoords="offset points",
                        xytext=(5, 4), fontsize=8)
    ax.set_xlabel(recipe.xlabel or "drive amplitude B1 (MHz)")
    ax.set_ylabel(recipe.ylabel or "gate time (us)")
    ax.legend(loc="upper right", fontsize=9)


def _draw_grid_heatmap(fig, ax, tables, recipe) -> None:
    table = tables[0]
    b1_axis, tw_axis, f = grid_arrays(table)
    x_edges = _cell_edges(tw_axis)
    y_edges = _cell_edges(b1_axis)

    mesh = ax.pcolormesh(x_edges, y_edges, f, cmap="viridis", vmax=1.0)
    fig.colorbar(mesh, ax=ax, label="average gate fidelity")

    segments = threshold_boundary(f > recipe.threshold, x_edges, y_edges)
    if segments:
        ax.add_collection(LineCollection(segments, colors=THRESHOLD_COLOR, lw=1.2))
    ax.set_xlabel(recipe.xlabel or "waiting time t_w (us)")
    ax.set_ylabel(recipe.ylabel or "drive amplitude B1 (MHz)")


def _draw_noise_curves(fig, ax, tables, recipe) -> None:
    table = tables[0]
    b1 = table.floats("b1_MHz")
    t2 = table.floats("t2star_us")
    f = table.floats("F_avg")
    for value in dict.fromkeys(t2):  # first-appearance order
        sel = t2 == value
        ax.plot(b1[sel], f[sel], lw=1.2, label=f"T2* = {value:g} us")
    ax.set_xlabel(recipe.xlabel or "drive amplitude B1 (MHz)")
    ax.set_ylabel(recipe.ylabel or "noise-averaged fidelity")
    ax.legend(loc="lower right", fontsize=9)


_DRAW = {
    "b1_sweep": _draw_b1_sweep,
    "sync_scatter": _draw_sync_scatter,
    "grid_heatmap": _draw_grid_heatmap,
    "noise_curves": _draw_noise_curves,
}


def grid_arrays(table: Table):
    """Amplitude axis, wait-time axis, and the fidelity matrix of a grid file.

    Rows must form a complete amplitude-major lattice: the wait-time column
    cycles fastest.  That is how the CLI writes them; anything else means
    the file was filtered or reordered, which this layer refuses to guess
    around.
    """
    b1 = table.floats("b1_MHz")
    tw = table.floats("tw_us")
    f = table.floats("F_avg")
    b1_axis = np.unique(b1)
    tw_axis = np.unique(tw)
    if b1_axis.size * tw_axis.size != f.size:
        raise SchemaError("grid rows do not form a complete lattice")
    if not np.array_equal(b1, np.repeat(b1_axis, tw_axis.size)) or not np.array_equal(
        tw, np.tile(tw_axis, b1_axis.size)
    ):
        raise SchemaError("grid rows are not in amplitude-major order")
    return b1_axis, tw_axis, f.reshape(b1_axis.size, tw_axis.size)


def threshold_mask(table: Table, level: float) -> np.ndarray:
    """Boolean matrix of grid cells with fidelity above ``level``."""
    _, _, f = grid_arrays(table)
    return f > level


def _cell_edges(centers: np.ndarray) -> np.ndarray:
    if centers.size == 1:
        return np.array([centers[0] - 0.5, centers[0] + 0.5])
    mid = 0.5 * (centers[:-1] + centers[1:])
    return np.concatenate(([2 * centers[0] - mid[0]], mid, [2 * centers[-1] - mid[-1]]))


def threshold_boundary(mask: np.ndarray, x_edges: np.ndarray, y_edges: np.ndarray):
    """Cell-edge outline of the True region, as line segments.

    The outline follows cell borders exactly, so the marked region is the
    set of above-threshold cells itself, not an interpolated level curve
    that could cut through a cell.
    """
    if mask.shape != (y_edges.size - 1, x_edges.size - 1):
        raise ValueError("mask shape does not match the edge arrays")
    padded = np.pad(mask, 1, constant_values=False)

    segments = []
    horizontal = padded[1:, 1:-1] != padded[:-1, 1:-1]
    for i, j in zip(*np.nonzero(horizontal)):
        segments.append(((x_edges[j], y_edges[i]), (x_edges[j + 1], y_edges[i])))
    vertical = padded[1:-1, 1:] != padded[1:-1, :-1]
    for i, j in zip(*np.nonzero(vertical)):
        segments.append(((x_edges[j], y_edges[i]), (x_edges[j], y_edges[i + 1])))
    return segments
