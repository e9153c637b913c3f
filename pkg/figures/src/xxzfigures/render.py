"""Render simulation CSV tables into figures.

The inputs are the CSV files written by the ``xxzqubits`` CLI; nothing is
recomputed here.  Three figure kinds are supported:

* ``traces``  - concurrence against time, one line per field value,
* ``heatmap`` - concurrence over the (field, time) plane, with located
  critical fields marked by circles on the field axis,
* ``bcscatter`` - first critical field against 1/N with the fitted line.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("traces", "heatmap", "bcscatter")

_DPI = 150
_METADATA = {"Software": "xxzfigures"}


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    figure_kind: str
    output_image: Path
    crossings_csv: Path | None = None
    fit_csv: Path | None = None
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.figure_kind not in KINDS:
            raise ValueError(f"figure_kind must be one of {KINDS}")


@dataclass(frozen=True)
class RenderResult:
    output_image: Path
    series_count: int
    marked_crossings: tuple[float, ...] = ()


def _read_table(path: Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            columns = reader.fieldnames or []
            for col in required:
                if col not in columns:
                    raise ValueError(f"missing column {col!r} in {path}")
            rows = list(reader)
    except FileNotFoundError:
        raise ValueError(f"input CSV not found: {path}") from None
    if not rows:
        raise ValueError(f"input CSV has no data rows: {path}")
    out: dict[str, np.ndarray] = {}
    for col in columns:
        values = [r[col] for r in rows]
        try:
            out[col] = np.array([float(v) for v in values])
        except ValueError:
            out[col] = np.array(values)
    return out


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.title:
        ax.set_title(spec.title)
    return fig, ax


def _save(fig, spec: FigureSpec):
    spec.output_image.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output_image, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def _render_traces(spec: FigureSpec) -> RenderResult:
    table = _read_table(spec.input_csv, ("time", "concurrence"))
    fig, ax = _new_axes(spec)
    if "field" in table:
        fields = np.unique(table["field"])
        for b in fields:
            sel = table["field"] == b
            ax.plot(table["time"][sel], table["concurrence"][sel], label=f"B = {b:g}")
        ax.legend(loc="upper right", fontsize=8)
        count = len(fields)
    else:
        ax.plot(table["time"], table["concurrence"])
        count = 1
    ax.set_xlabel(spec.xlabel or "time  (1/J)")
    ax.set_ylabel(spec.ylabel or "concurrence")
    ax.set_ylim(-0.02, 1.05)
    _save(fig, spec)
    return RenderResult(spec.output_image, count)


def _render_heatmap(spec: FigureSpec) -> RenderResult:
    table = _read_table(spec.input_csv, ("field", "time", "concurrence"))
    fields = np.unique(table["field"])
    times = np.unique(table["time"])
    grid = np.full((times.size, fields.size), np.nan)
    f_idx = {v: i for i, v in enumerate(fields)}
    t_idx = {v: i for i, v in enumerate(times)}
    for b, t, c in zip(table["field"], table["time"], table["concurrence"]):
        grid[t_idx[t], f_idx[b]] = c
    fig, ax = _new_axes(spec)
    mesh = ax.pcolormesh(fields, times, grid, cmap="viridis", vmin=0.0, vmax=1.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="concurrence")
    marked: tuple[float, ...] = ()
    if spec.crossings_csv is not None:
        crossings = _read_table(spec.crossings_csv, ("field",))
        marked = tuple(float(b) for b in crossings["field"])
        ax.plot(
            marked,
            np.full(len(marked), times.min()),
            "o",
            color="red",
            markersize=9,
            markerfacecolor="none",
            markeredgewidth=1.8,
            clip_on=False,
            zorder=5,
        )
    ax.set_xlabel(spec.xlabel or "field B")
    ax.set_ylabel(spec.ylabel or "time  (1/J)")
    _save(fig, spec)
    return RenderResult(spec.output_image, fields.size, marked)


def _render_bcscatter(spec: FigureSpec) -> RenderResult:
    points = _read_table(spec.input_csv, ("inv_n", "critical_field"))
    groups = (
        [(label, points["boundary"] == label) for label in np.unique(points["boundary"])]
        if "boundary" in points
        else [("", np.ones(points["inv_n"].size, dtype=bool))]
    )
    fits = {}
    if spec.fit_csv is not None:
        fit_table = _read_table(spec.fit_csv, ("slope", "intercept"))
        labels = fit_table.get("boundary", np.array([""] * fit_table["slope"].size))
        for label, slope, intercept in zip(labels, fit_table["slope"], fit_table["intercept"]):
            fits[str(label)] = (float(slope), float(intercept))
    fig, ax = _new_axes(spec)
    for label, sel in groups:
        xs, ys = points["inv_n"][sel], points["critical_field"][sel]
        ax.plot(xs, ys, "o", label=str(label) or None)
        fit = fits.get(str(label))
        if fit is not None:
            line_x = np.linspace(0.0, xs.max() * 1.05, 50)
            ax.plot(line_x, fit[0] * line_x + fit[1], "-", alpha=0.7)
    if any(label for label, _ in groups):
        ax.legend()
    ax.set_xlabel(spec.xlabel or "1/N")
    ax.set_ylabel(spec.ylabel or "first critical field")
    ax.set_xlim(left=0.0)
    _save(fig, spec)
    return RenderResult(spec.output_image, len(groups))


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns what was drawn (series and marked fields)."""
    if spec.figure_kind == "traces":
        return _render_traces(spec)
    if spec.figure_kind == "heatmap":
        return _render_heatmap(spec)
    return _render_bcscatter(spec)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="xxz-figures", description="Render xxzqubits CSV output into figures"
    )
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True, help="output image path")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--crossings", help="critical-fields CSV (heatmap markers)")
    parser.add_argument("--fit", help="fit-parameters CSV (bcscatter line)")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        input_csv=Path(args.input),
        figure_kind=args.kind,
        output_image=Path(args.output),
        crossings_csv=Path(args.crossings) if args.crossings else None,
        fit_csv=Path(args.fit) if args.fit else None,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
    )
    try:
        result = render(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output_image}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
