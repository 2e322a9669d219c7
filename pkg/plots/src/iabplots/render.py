"""Render coverage curves from simulator sweep CSVs.

The renderer consumes only the CSV tables (and their sidecars, if a reader
wants provenance) emitted by the simulator's CLI; it never recomputes
simulation quantities. Every input must carry the exact sweep header; a
mismatch is an error that names the offending columns.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

# Header contract of the simulator's sweep/run CSVs.
EXPECTED_HEADER = [
    "axis_value",
    "coverage",
    "ci_halfwidth",
    "mean_rate_bps",
    "mean_hop_m",
    "discarded",
    "n_realizations",
]


class RenderError(ValueError):
    """The figure spec or its inputs cannot produce an image."""


class HeaderError(RenderError):
    """A curve CSV does not match the sweep header contract."""


@dataclass
class Curve:
    csv_path: str
    label: str


@dataclass
class FigureSpec:
    curves: list[Curve]
    output: str
    x_key: str = "axis_value"
    x_label: str = "axis value"
    title: str = ""
    y_label: str = "service coverage probability"
    base_dir: str = "."

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def load_figure_spec(path: str) -> FigureSpec:
    """Read a figure spec JSON; relative paths resolve against its folder."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise RenderError(f"cannot read figure spec {path}: {exc}") from exc
    try:
        curves = [Curve(c["csv"], c.get("label", c["csv"])) for c in doc["curves"]]
        spec = FigureSpec(
            curves=curves,
            output=doc["output"],
            x_key=doc.get("x_key", "axis_value"),
            x_label=doc.get("x_label", "axis value"),
            title=doc.get("title", ""),
            base_dir=os.path.dirname(os.path.abspath(path)),
        )
    except (KeyError, TypeError) as exc:
        raise RenderError(f"figure spec {path} is missing required fields: {exc}") from exc
    if not spec.curves:
        raise RenderError(f"figure spec {path} lists no curves")
    return spec


def read_sweep_csv(path: str, x_key: str) -> tuple[list[float], list[float], list[float]]:
    """Read (x, coverage, ci_halfwidth) columns under the header contract."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            if header != EXPECTED_HEADER:
                missing = [c for c in EXPECTED_HEADER if c not in (header or [])]
                extra = [c for c in (header or []) if c not in EXPECTED_HEADER]
                raise HeaderError(
                    f"{path}: header mismatch (missing columns {missing}, unexpected {extra})"
                )
            if x_key not in header:
                raise HeaderError(f"{path}: x key {x_key!r} not in header")
            rows = list(reader)
    except OSError as exc:
        raise RenderError(f"cannot read curve CSV {path}: {exc}") from exc
    if not rows:
        raise RenderError(f"{path}: no data rows")
    try:
        xs = [float(r[x_key]) for r in rows]
        ys = [float(r["coverage"]) for r in rows]
        cis = [float(r["ci_halfwidth"]) for r in rows]
    except ValueError as exc:
        raise RenderError(f"{path}: non-numeric cell: {exc}") from exc
    return xs, ys, cis


def render_figure(spec: FigureSpec) -> str:
    """Draw one coverage figure; returns the written image path.

    One errorbar curve per CSV, y fixed to the coverage column with
    ci_halfwidth bars. All inputs are validated before any file is written,
    so a failing curve leaves no image behind.
    """
    series = [
        (curve.label, *read_sweep_csv(spec.resolve(curve.csv_path), spec.x_key))
        for curve in spec.curves
    ]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    markers = ["o", "s", "^", "D", "v", "<", ">", "p"]
    for k, (label, xs, ys, cis) in enumerate(series):
        ax.errorbar(
            xs, ys, yerr=cis, label=label, marker=markers[k % len(markers)],
            capsize=3, linewidth=1.6, markersize=5,
        )
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_ylim(0.0, 1.0)
    ax.grid(alpha=0.3, linestyle=":")
    if spec.title:
        ax.set_title(spec.title)
    if len(series) > 1 or series[0][0]:
        ax.legend()
    out = spec.resolve(spec.output)
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out
