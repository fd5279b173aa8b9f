"""Rendering: recall heatmaps (text, CSV, SVG), baseline-delta tables, and
the per-scenario precision report.

Matrices put the baseline row first (labeled "none") and the benign column
first, with unit rows/columns ascending by id. Undefined cells stay
undefined all the way to the output ("n/a", hatched in SVG). Rendering is
pure: equal inputs yield identical bytes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .dataset import AttackTaxonomy
from .errors import ReportError
from .metrics import AggregatedRow
from .splitting import MODE_BASELINE

BASELINE_ROW_LABEL = "none"
BENIGN_COL_LABEL = "benign"
UNDEFINED_TEXT = "n/a"


@dataclass(frozen=True, eq=False)
class MetricsMatrix:
    classifier: str
    mode: str
    level: str
    row_units: tuple[int | None, ...]  # None = the baseline row
    row_labels: tuple[str, ...]
    col_groups: tuple[int, ...]  # 0 = benign
    col_labels: tuple[str, ...]
    cells: tuple[tuple[float | None, ...], ...]
    defined_folds: tuple[tuple[int, ...], ...]

    def cell(self, row_unit: int | None, col_group: int) -> float | None:
        return self.cells[self.row_units.index(row_unit)][self.col_groups.index(col_group)]

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "mode": self.mode,
            "level": self.level,
            "row_units": list(self.row_units),
            "row_labels": list(self.row_labels),
            "col_groups": list(self.col_groups),
            "col_labels": list(self.col_labels),
            "cells": [list(row) for row in self.cells],
            "defined_folds": [list(row) for row in self.defined_folds],
        }

    @staticmethod
    def from_dict(data: dict) -> "MetricsMatrix":
        return MetricsMatrix(
            classifier=data["classifier"],
            mode=data["mode"],
            level=data["level"],
            row_units=tuple(data["row_units"]),
            row_labels=tuple(data["row_labels"]),
            col_groups=tuple(data["col_groups"]),
            col_labels=tuple(data["col_labels"]),
            cells=tuple(tuple(row) for row in data["cells"]),
            defined_folds=tuple(tuple(row) for row in data["defined_folds"]),
        )


def build_matrix(
    classifier: str,
    mode: str,
    level: str,
    baseline: AggregatedRow | None,
    unit_rows: dict[int, AggregatedRow],
    tax: AttackTaxonomy,
) -> MetricsMatrix:
    """Assemble one mode's matrix from aggregated rows: the baseline row
    first, then one row per target unit ascending.
    """
    units = tax.unit_ids(level)
    col_groups = [0, *units]
    col_labels = [BENIGN_COL_LABEL, *(tax.unit_label(level, u) for u in units)]
    row_units: list[int | None] = []
    row_labels: list[str] = []
    cells: list[tuple[float | None, ...]] = []
    defined: list[tuple[int, ...]] = []

    def push(unit: int | None, label: str, row: AggregatedRow) -> None:
        row_units.append(unit)
        row_labels.append(label)
        cells.append(tuple(row.group_means[g] for g in col_groups))
        defined.append(tuple(row.defined_folds[g] for g in col_groups))

    if baseline is not None:
        push(None, BASELINE_ROW_LABEL, baseline)
    for unit in units:
        if mode != MODE_BASELINE:
            if unit not in unit_rows:
                raise ReportError(f"missing aggregated row for {mode} unit {unit}")
            push(unit, tax.unit_label(level, unit), unit_rows[unit])
    return MetricsMatrix(
        classifier=classifier,
        mode=mode,
        level=level,
        row_units=tuple(row_units),
        row_labels=tuple(row_labels),
        col_groups=tuple(col_groups),
        col_labels=tuple(col_labels),
        cells=tuple(cells),
        defined_folds=tuple(defined),
    )


@dataclass(frozen=True)
class HeatmapSpec:
    output: str = "text"  # text | csv | svg
    ramp_low: str = "#fde725"  # low recall reads light
    ramp_high: str = "#440154"
    annotate: bool = True
    undefined_marker: str = UNDEFINED_TEXT

    def __post_init__(self) -> None:
        if self.output not in ("text", "csv", "svg"):
            raise ReportError(f"unknown heatmap output kind {self.output!r}")
        if self.ramp_low == self.ramp_high:
            raise ReportError("color ramp endpoints must be distinct")


def _percent(value: float | None, marker: str) -> str:
    if value is None:
        return marker
    return f"{value * 100:.1f}"


def render_text_heatmap(m: MetricsMatrix, spec: HeatmapSpec | None = None) -> str:
    spec = spec or HeatmapSpec()
    if not m.row_labels or not m.col_labels:
        raise ReportError("empty matrix")
    texts = [[_percent(v, spec.undefined_marker) for v in row] for row in m.cells]
    col_widths = [
        max(len(m.col_labels[j]), max(len(row[j]) for row in texts)) for j in range(len(m.col_labels))
    ]
    label_width = max(len(label) for label in m.row_labels)
    lines = [
        " " * label_width
        + "".join(f"  {m.col_labels[j]:>{col_widths[j]}}" for j in range(len(m.col_labels)))
    ]
    for label, row in zip(m.row_labels, texts):
        lines.append(
            f"{label:<{label_width}}"
            + "".join(f"  {row[j]:>{col_widths[j]}}" for j in range(len(row)))
        )
    return "\n".join(lines) + "\n"


def _parse_hex(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    if len(color) != 6:
        raise ReportError(f"bad color {color!r}")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def _ramp_color(spec: HeatmapSpec, value: float) -> str:
    low = _parse_hex(spec.ramp_low)
    high = _parse_hex(spec.ramp_high)
    mixed = tuple(round(lo + (hi - lo) * value) for lo, hi in zip(low, high))
    return "#{:02x}{:02x}{:02x}".format(*mixed)


def _luminance(color: str) -> float:
    r, g, b = _parse_hex(color)
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg_heatmap(m: MetricsMatrix, spec: HeatmapSpec | None = None) -> str:
    """Hand-emitted SVG: one rect per cell, linear color ramp on recall,
    hatched rects for undefined cells, labels on both axes.
    """
    spec = spec or HeatmapSpec()
    if not m.row_labels or not m.col_labels:
        raise ReportError("empty matrix")
    cell_w, cell_h = 46, 26
    left = 16 + 8 * max(len(label) for label in m.row_labels)
    top = 34
    width = left + cell_w * len(m.col_labels) + 12
    height = top + cell_h * len(m.row_labels) + 12

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs>",
        '<pattern id="undef" width="6" height="6" patternUnits="userSpaceOnUse">',
        '<rect width="6" height="6" fill="#f2f2f2"/>',
        '<path d="M0 6 L6 0" stroke="#b0b0b0" stroke-width="1"/>',
        "</pattern>",
        "</defs>",
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    font = 'font-family="monospace"'
    for j, label in enumerate(m.col_labels):
        x = left + j * cell_w + cell_w // 2
        parts.append(
            f'<text x="{x}" y="{top - 10}" text-anchor="middle" font-size="11" {font}>'
            f"{_esc(label)}</text>"
        )
    for i, label in enumerate(m.row_labels):
        y = top + i * cell_h + cell_h // 2 + 4
        parts.append(
            f'<text x="{left - 6}" y="{y}" text-anchor="end" font-size="11" {font}>'
            f"{_esc(label)}</text>"
        )
    for i, row in enumerate(m.cells):
        for j, value in enumerate(row):
            x = left + j * cell_w
            y = top + i * cell_h
            if value is None:
                fill = "url(#undef)"
                text = spec.undefined_marker
                text_fill = "#444444"
            else:
                fill = _ramp_color(spec, value)
                text = _percent(value, spec.undefined_marker)
                text_fill = "#111111" if _luminance(fill) > 0.55 else "#f5f5f5"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1"/>'
            )
            if spec.annotate:
                parts.append(
                    f'<text x="{x + cell_w // 2}" y="{y + cell_h // 2 + 4}" '
                    f'text-anchor="middle" font-size="10" fill="{text_fill}" {font}>'
                    f"{_esc(text)}</text>"
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def matrix_to_csv(m: MetricsMatrix) -> str:
    """Full-precision CSV: first row column labels, first column row labels,
    undefined cells as "n/a". Values round-trip exactly through repr.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["", *m.col_labels])
    for label, row in zip(m.row_labels, m.cells):
        writer.writerow([label, *(UNDEFINED_TEXT if v is None else repr(v) for v in row)])
    return buffer.getvalue()


def matrix_from_csv(text: str) -> tuple[list[str], list[str], list[list[float | None]]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 2:
        raise ReportError("empty matrix CSV")
    col_labels = rows[0][1:]
    row_labels = []
    cells = []
    for row in rows[1:]:
        if not row:
            continue
        row_labels.append(row[0])
        cells.append([None if cell == UNDEFINED_TEXT else float(cell) for cell in row[1:]])
    return row_labels, col_labels, cells


@dataclass(frozen=True, eq=False)
class DeltaTable:
    """Per-cell recall change against the baseline row, in percentage points."""

    classifier: str
    mode: str
    level: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    deltas: tuple[tuple[float | None, ...], ...]


def delta_vs_baseline(m: MetricsMatrix) -> DeltaTable:
    if None not in m.row_units:
        raise ReportError("matrix has no baseline row")
    base = m.cells[m.row_units.index(None)]
    row_labels = []
    deltas = []
    for unit, label, row in zip(m.row_units, m.row_labels, m.cells):
        if unit is None:
            continue
        row_labels.append(label)
        deltas.append(
            tuple(
                None if v is None or b is None else (v - b) * 100.0
                for v, b in zip(row, base)
            )
        )
    return DeltaTable(
        classifier=m.classifier,
        mode=m.mode,
        level=m.level,
        row_labels=tuple(row_labels),
        col_labels=m.col_labels,
        deltas=tuple(deltas),
    )


def precision_report(artifact) -> list[dict]:
    """Rows of (classifier, scenario, mean precision, baseline precision,
    delta), one per aggregated scenario. Needs the artifact's baseline rows.
    """
    baselines: dict[tuple[str, str], float | None] = {}
    for item in artifact.aggregates:
        row: AggregatedRow = item.row
        if row.scenario.mode == MODE_BASELINE:
            baselines[(item.classifier, row.level)] = row.precision
    if not baselines:
        raise ReportError("artifact has no baseline scenario")
    table = []
    for item in artifact.aggregates:
        row = item.row
        key = (item.classifier, row.level)
        if key not in baselines:
            raise ReportError(f"no baseline precision for classifier {key[0]} at level {key[1]}")
        base = baselines[key]
        value = row.precision
        delta = None if value is None or base is None else value - base
        table.append(
            {
                "classifier": item.classifier,
                "scenario": row.scenario.key(),
                "level": row.level,
                "precision": value,
                "baseline_precision": base,
                "delta": delta,
            }
        )
    return table


def precision_report_csv(table: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["classifier", "scenario", "level", "precision", "baseline_precision", "delta"])
    for row in table:
        writer.writerow(
            [
                row["classifier"],
                row["scenario"],
                row["level"],
                *(
                    UNDEFINED_TEXT if row[key] is None else repr(row[key])
                    for key in ("precision", "baseline_precision", "delta")
                ),
            ]
        )
    return buffer.getvalue()
