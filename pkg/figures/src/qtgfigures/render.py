"""Scatter rendering from benchmark record CSVs.

The input contract is the records.csv emitted by the benchmark harness:
instance,n,d,classical_seconds,quantum_cycles,quantum_seconds,gap. One
marker per row, classical seconds against emulated quantum seconds on
log-log axes, marker area growing with instance size and marker color
encoding the optimality gap. Rows are never dropped: values that cannot
sit on a log axis are clamped to a documented floor, and a sidecar CSV of
the exact plotted coordinates accompanies every image so geometry can be
checked without decoding pixels.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import Normalize

EXPECTED_COLUMNS = (
    "instance",
    "n",
    "d",
    "classical_seconds",
    "quantum_cycles",
    "quantum_seconds",
    "gap",
)

#: nonpositive or unparsable axis values are clamped here so every row
#: stays visible on the logarithmic axes
LOG_FLOOR = 1e-9

COORDS_COLUMNS = (
    "instance",
    "x",
    "y",
    "log10_x",
    "log10_y",
    "marker_size",
    "color_value",
)

MISSING_COLOR = "0.6"
IDENTITY_GID = "identity-line"


class PlotError(ValueError):
    """Unusable plot input: missing columns or no data."""


@dataclass(frozen=True)
class PlotSpec:
    """What to read, where to draw it, and which columns carry which role."""

    csv_path: str
    out_path: str
    coords_path: str | None = None
    x_column: str = "classical_seconds"
    y_column: str = "quantum_seconds"
    size_column: str = "n"
    color_column: str = "gap"
    x_scale: str = "log"
    y_scale: str = "log"
    identity_line: bool = True

    def resolved_coords_path(self) -> str:
        if self.coords_path is not None:
            return self.coords_path
        stem, _ = os.path.splitext(self.out_path)
        return f"{stem}_points.csv"


@dataclass(frozen=True)
class RenderResult:
    """Plotted geometry as drawn, read back from the figure itself."""

    out_path: str
    coords_path: str
    points: tuple[tuple[float, float], ...]
    clamped: int
    identity_line: bool


def _read_rows(spec: PlotSpec) -> list[dict]:
    with open(spec.csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise PlotError(f"{spec.csv_path}: no data (empty file)")
        referenced = (
            spec.x_column,
            spec.y_column,
            spec.size_column,
            spec.color_column,
            "instance",
        )
        missing = [c for c in referenced if c not in header]
        if missing:
            raise PlotError(
                f"{spec.csv_path}: missing columns {missing}; expected header "
                + ",".join(EXPECTED_COLUMNS)
            )
        rows = list(reader)
    if not rows:
        raise PlotError(f"{spec.csv_path}: no data rows")
    return rows


def _axis_value(cell: str | None) -> tuple[float, bool]:
    """Parse one axis cell; returns (clamped value, whether clamping fired)."""
    try:
        value = float(cell) if cell is not None and cell.strip() else math.nan
    except ValueError:
        value = math.nan
    if not math.isfinite(value) or value <= 0.0:
        return LOG_FLOOR, True
    return value, False


def _color_value(cell: str | None) -> float:
    try:
        return float(cell) if cell is not None and cell.strip() else math.nan
    except ValueError:
        return math.nan


def _marker_size(cell: str | None) -> float:
    # area in points^2, growing linearly with the size column
    try:
        value = float(cell) if cell is not None and cell.strip() else 1.0
    except ValueError:
        value = 1.0
    return 10.0 + 3.0 * max(value, 0.0)


def _write_coords(path: str, rows: list[dict], spec: PlotSpec,
                  xs: list[float], ys: list[float], sizes: list[float],
                  colors: list[float]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COORDS_COLUMNS)
        for row, x, y, s, c in zip(rows, xs, ys, sizes, colors):
            writer.writerow(
                [
                    row.get("instance", ""),
                    format(x, ".9g"),
                    format(y, ".9g"),
                    format(math.log10(x), ".6f"),
                    format(math.log10(y), ".6f"),
                    format(s, ".9g"),
                    "" if math.isnan(c) else format(c, ".9g"),
                ]
            )


def render_scatter(spec: PlotSpec) -> RenderResult:
    """Draw the comparison scatter and its coordinate sidecar.

    Returns the geometry actually handed to the canvas: point coordinates
    are read back from the scatter collection and the identity-line flag
    from the axes, not echoed from the input.
    """
    rows = _read_rows(spec)
    clamped = 0
    xs: list[float] = []
    ys: list[float] = []
    for row in rows:
        x, cx = _axis_value(row.get(spec.x_column))
        y, cy = _axis_value(row.get(spec.y_column))
        clamped += int(cx) + int(cy)
        xs.append(x)
        ys.append(y)
    sizes = [_marker_size(row.get(spec.size_column)) for row in rows]
    colors = [_color_value(row.get(spec.color_column)) for row in rows]

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
    ax.set_xscale(spec.x_scale)
    ax.set_yscale(spec.y_scale)

    finite = [c for c in colors if math.isfinite(c)]
    if finite:
        vmin, vmax = min(finite), max(finite)
        if vmin == vmax:
            # degenerate scale: widen symmetrically so a constant column
            # maps to one mid-scale color instead of dividing by zero
            vmin, vmax = vmin - 0.5, vmax + 0.5
        cmap = matplotlib.colormaps["viridis"].copy()
        cmap.set_bad(MISSING_COLOR)
        values = np.ma.masked_invalid(np.array(colors, dtype=float))
        sc = ax.scatter(
            xs, ys, s=sizes, c=values, cmap=cmap,
            norm=Normalize(vmin=vmin, vmax=vmax),
            edgecolors="none", zorder=3, plotnonfinite=True,
        )
        fig.colorbar(sc, ax=ax, label=spec.color_column)
    else:
        sc = ax.scatter(xs, ys, s=sizes, color=MISSING_COLOR,
                        edgecolors="none", zorder=3)

    identity_drawn = False
    if spec.identity_line:
        lo = min(min(xs), min(ys))
        hi = max(max(xs), max(ys))
        if lo == hi:
            lo, hi = lo / 2.0, hi * 2.0
        line = ax.plot(
            [lo, hi], [lo, hi], color="0.3", linewidth=1.0,
            linestyle="--", zorder=1, label=f"{spec.x_column} = {spec.y_column}",
        )[0]
        line.set_gid(IDENTITY_GID)

    # size legend: a few representative values drawn as phantom points
    handles, labels = ax.get_legend_handles_labels()
    for value in sorted({min(sizes), max(sizes)}):
        handles.append(
            plt.scatter([], [], s=value, color="0.4",
                        label=f"marker area {value:g}")
        )
    labels = [h.get_label() for h in handles]
    if handles:
        ax.legend(handles, labels, fontsize=8, loc="best")

    ax.set_xlabel(spec.x_column)
    ax.set_ylabel(spec.y_column)
    ax.grid(True, which="both", alpha=0.25)

    points = tuple(
        (float(x), float(y)) for x, y in np.asarray(sc.get_offsets(), dtype=float)
    )
    identity_drawn = any(ln.get_gid() == IDENTITY_GID for ln in ax.lines)

    fig.savefig(spec.out_path, metadata={"Software": None})
    plt.close(fig)

    coords_path = spec.resolved_coords_path()
    _write_coords(coords_path, rows, spec, xs, ys, sizes, colors)
    return RenderResult(
        out_path=spec.out_path,
        coords_path=coords_path,
        points=points,
        clamped=clamped,
        identity_line=identity_drawn,
    )
