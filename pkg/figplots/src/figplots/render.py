"""Render covertlab sweep CSVs into publication-style rate figures.

This layer is deliberately schema-coupled and physics-free: it maps columns
of the sweep CSV onto styled curves and never recomputes anything.  Empty
cells (boundary or non-covert-regime signals) become NaN, which breaks the
curve instead of plotting zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """The input CSV does not carry a column the figure needs."""


@dataclass(frozen=True)
class Curve:
    column: str
    label: str
    color: str
    linestyle: str


@dataclass(frozen=True)
class FigureSpec:
    key: str
    title: str
    x_column: str
    x_label: str
    x_scale: str
    y_scale: str
    curves: tuple[Curve, ...]


_RATE_Y_LABEL = "covert ebits"

_FIG4_CURVES = (
    Curve("optimal_ebits", "optimal", "black", "solid"),
    Curve("single_rail_ebits", "single-rail", "tab:red", "dotted"),
    Curve("dual_rail_ebits", "dual-rail", "tab:blue", "dashdot"),
    Curve("asymptote_ebits", "large-noise asymptote", "gold", "dashed"),
)

_FIG5_CURVES = (
    Curve("optimal_ebits", "optimal", "black", "solid"),
    Curve("single_rail_ebits", "single-rail", "tab:red", "dotted"),
    Curve("dual_rail_ebits", "dual-rail", "tab:blue", "dashdot"),
)

_FIG6_CURVES = (
    Curve("optimal_ebits", "optimal", "tab:blue", "solid"),
    Curve("single_rail_ebits", "single-rail", "gold", "dotted"),
    Curve("dual_rail_ebits", "dual-rail", "tab:red", "dashdot"),
)


def _fig4(key: str, eta: str) -> FigureSpec:
    return FigureSpec(
        key=key,
        title=f"covert ebits vs thermal noise (transmittance {eta})",
        x_column="abscissa",
        x_label="mean thermal photon number",
        x_scale="log",
        y_scale="log",
        curves=_FIG4_CURVES,
    )


def _fig5(key: str, nbar: str) -> FigureSpec:
    return FigureSpec(
        key=key,
        title=f"covert ebits vs transmittance (thermal mean {nbar})",
        x_column="abscissa",
        x_label="transmittance",
        x_scale="linear",
        y_scale="log",
        curves=_FIG5_CURVES,
    )


FIGURES = {
    "fig4a": _fig4("fig4a", "0.95"),
    "fig4b": _fig4("fig4b", "0.8"),
    "fig4c": _fig4("fig4c", "0.65"),
    "fig5a": _fig5("fig5a", "1e-6"),
    "fig5b": _fig5("fig5b", "1e-3"),
    "fig5c": _fig5("fig5c", "1e-1"),
    "fig6": FigureSpec(
        key="fig6",
        title="covert ebits over the free-space optical link",
        x_column="abscissa",
        x_label="wavelength (nm)",
        x_scale="linear",
        y_scale="log",
        curves=_FIG6_CURVES,
    ),
}


def load_rows(csv_path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    """Read a sweep CSV, skipping the ``#`` configuration comments."""
    with open(csv_path, encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if line.strip() and not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{csv_path}: no CSV header found") from None
    rows = [dict(zip(header, row)) for row in reader]
    return header, rows


def _column(rows: list[dict[str, str]], name: str) -> np.ndarray:
    values = []
    for row in rows:
        cell = row.get(name, "")
        values.append(float(cell) if cell != "" else math.nan)
    return np.array(values)


def build_figure(spec: FigureSpec, header: list[str], rows: list[dict[str, str]]):
    """Assemble the matplotlib figure; raises SchemaError naming a missing column."""
    needed = [spec.x_column] + [curve.column for curve in spec.curves]
    for name in needed:
        if name not in header:
            raise SchemaError(f"column {name!r} missing from the CSV schema")
    x = _column(rows, spec.x_column)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=150)
    for curve in spec.curves:
        ax.plot(
            x,
            _column(rows, curve.column),
            label=curve.label,
            color=curve.color,
            linestyle=curve.linestyle,
            linewidth=1.6,
        )
    ax.set_xscale(spec.x_scale)
    ax.set_yscale(spec.y_scale)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(_RATE_Y_LABEL)
    ax.set_title(spec.title)
    ax.legend(loc="best")
    ax.grid(True, which="major", alpha=0.3)
    fig.tight_layout()
    return fig


def render(figure_key: str, csv_path: str | Path, out_path: str | Path) -> Path:
    """Render one named figure from a sweep CSV to an image file."""
    if figure_key not in FIGURES:
        raise SchemaError(f"unknown figure {figure_key!r}; choose from {', '.join(FIGURES)}")
    spec = FIGURES[figure_key]
    header, rows = load_rows(csv_path)
    fig = build_figure(spec, header, rows)
    out_path = Path(out_path)
    metadata = {"Date": None} if out_path.suffix == ".svg" else None
    try:
        fig.savefig(out_path, metadata=metadata)
    finally:
        plt.close(fig)
    return out_path
