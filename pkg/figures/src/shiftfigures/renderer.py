"""Grouped plots from results tables: boxplots and required-n curves.

Input is the experiment harness's CSV schema
(study,param,method,rep,estimate,truth,abs_error).  Rendering is
deterministic for a fixed input and spec: fixed figure size, groups
ordered by parameter value and then method name, and no timestamps in
the output bytes.  The input file is never modified.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Patch

from .errors import ConfigurationError, InputDataError, OutputExistsError, SchemaError

KINDS = ("boxplot_by_param", "boxplot_by_method", "required_n_curve")

SCHEMA = ("study", "param", "method", "rep", "estimate", "truth", "abs_error")

_FORMATS = (".png", ".svg")

_FIGSIZE = (8.0, 5.0)
_DPI = 100

# Fixed palette; group j always gets _PALETTE[j % len(_PALETTE)].
_PALETTE = ("#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4", "#8c613c")

# Stable ids inside SVG output, instead of per-process hashes.
_SVG_SALT = "shiftfigures"


@dataclass(frozen=True)
class ResultRow:
    """One replication record from a results CSV."""

    study: str
    param: float
    method: str
    rep: int
    estimate: float
    truth: float
    abs_error: float


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input table, figure kind, grouping, and output path.

    group_columns drives the grouping: the first column keys the primary
    groups (x positions for boxplots, one line per value for the curve
    kind) and the second distinguishes boxes within a group for
    boxplot_by_method.  title/xlabel/ylabel override the defaults.
    """

    input_path: str
    kind: str
    out_path: str
    group_columns: tuple[str, ...] = ("param", "method")
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    logy: bool = False
    force: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigurationError(
                f"kind: expected one of {', '.join(KINDS)}, got {self.kind!r}"
            )
        ext = os.path.splitext(self.out_path)[1].lower()
        if ext not in _FORMATS:
            raise ConfigurationError(
                f"out: only {' and '.join(_FORMATS)} outputs are supported, got {self.out_path!r}"
            )
        cols = tuple(self.group_columns)
        object.__setattr__(self, "group_columns", cols)
        if not 1 <= len(cols) <= 2:
            raise ConfigurationError("group_columns: expected one or two column names")
        for col in cols:
            if col not in SCHEMA:
                raise ConfigurationError(
                    f"group_columns: {col!r} is not a results column "
                    f"(schema: {','.join(SCHEMA)})"
                )
        if self.kind == "boxplot_by_method" and len(cols) < 2:
            raise ConfigurationError("group_columns: boxplot_by_method needs two columns")

    def to_json(self) -> dict:
        return {
            "input_path": self.input_path,
            "kind": self.kind,
            "out_path": self.out_path,
            "group_columns": list(self.group_columns),
            "title": self.title,
            "xlabel": self.xlabel,
            "ylabel": self.ylabel,
            "logy": self.logy,
            "force": self.force,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "FigureSpec":
        known = {
            "input_path",
            "kind",
            "out_path",
            "group_columns",
            "title",
            "xlabel",
            "ylabel",
            "logy",
            "force",
        }
        for key in payload:
            if key not in known:
                raise ConfigurationError(f"unknown figure spec field: {key!r}")
        for key in ("input_path", "kind", "out_path"):
            if key not in payload:
                raise ConfigurationError(f"missing figure spec field: {key!r}")
        data = dict(payload)
        if "group_columns" in data:
            data["group_columns"] = tuple(data["group_columns"])
        return cls(**data)


@dataclass(frozen=True)
class RenderReport:
    """What one render call consumed and produced.

    group_counts maps a group key to its row count: (param,) keys for
    boxplot_by_param, (param, method) keys for boxplot_by_method, and
    (param,) keys counting curve points for required_n_curve.
    """

    out_path: str
    kind: str
    rows: int
    group_counts: dict = field(default_factory=dict)

    @property
    def groups(self) -> int:
        return len(self.group_counts)


def read_results(path: str) -> list[ResultRow]:
    """Parse a results CSV, validating the full column schema.

    Extra columns are tolerated and ignored; a missing schema column is
    an error naming that column.  Rows must be rectangular and numeric in
    the numeric columns.
    """
    source = Path(path)
    if not source.is_file():
        raise InputDataError(f"input CSV not found: {path}")
    with open(source, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"missing column: 'study' ({path} is empty)") from None
        index = {name: i for i, name in enumerate(header)}
        for col in SCHEMA:
            if col not in index:
                raise SchemaError(f"missing column: {col!r} in {path}")
        rows: list[ResultRow] = []
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise InputDataError(
                    f"row {lineno}: {len(record)} fields, expected {len(header)}"
                )
            try:
                rows.append(
                    ResultRow(
                        study=record[index["study"]],
                        param=float(record[index["param"]]),
                        method=record[index["method"]],
                        rep=int(record[index["rep"]]),
                        estimate=float(record[index["estimate"]]),
                        truth=float(record[index["truth"]]),
                        abs_error=float(record[index["abs_error"]]),
                    )
                )
            except ValueError as exc:
                raise InputDataError(f"row {lineno}: {exc}") from None
    return rows


def render(spec: FigureSpec) -> RenderReport:
    """Draw the figure described by spec and write it to spec.out_path.

    Raises SchemaError before anything is written when the table has no
    data rows, and OutputExistsError when the output path is occupied
    and force is not set.  The image is rendered to memory first, so a
    failed render never leaves a partial file behind.
    """
    rows = read_results(spec.input_path)
    if spec.kind == "required_n_curve":
        groups = _curve_series(spec, rows)
        counts = {key: len(points) for key, points in groups.items()}
    else:
        groups = _box_groups(spec, rows)
        counts = {key: len(values) for key, values in groups.items()}
    if os.path.exists(spec.out_path) and not spec.force:
        raise OutputExistsError(
            f"output exists: {spec.out_path} (pass --force to overwrite)"
        )
    payload = _draw(spec, groups)
    parent = os.path.dirname(os.path.abspath(spec.out_path))
    os.makedirs(parent, exist_ok=True)
    with open(spec.out_path, "wb") as handle:
        handle.write(payload)
    return RenderReport(
        out_path=spec.out_path, kind=spec.kind, rows=len(rows), group_counts=counts
    )


def _value(row: ResultRow, column: str):
    return getattr(row, column)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _box_groups(spec: FigureSpec, rows: list[ResultRow]) -> dict:
    """abs_error samples keyed by (param,) or (param, method), sorted."""
    if not rows:
        raise SchemaError(
            f"no data rows: column 'abs_error' has no values in {spec.input_path}"
        )
    width = 2 if spec.kind == "boxplot_by_method" else 1
    cols = spec.group_columns[:width]
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        key = tuple(_value(row, col) for col in cols)
        groups.setdefault(key, []).append(row.abs_error)
    return dict(sorted(groups.items(), key=lambda item: item[0]))


def _curve_series(spec: FigureSpec, rows: list[ResultRow]) -> dict:
    """(truth, estimate) points per primary group, sorted by truth.

    For harness tables the estimate column holds the required sample
    size and the truth column the error target it was swept against.
    """
    if not rows:
        raise SchemaError(
            f"no data rows: column 'estimate' has no values in {spec.input_path}"
        )
    col = spec.group_columns[0]
    series: dict[tuple, list[tuple[float, float]]] = {}
    for row in rows:
        series.setdefault((_value(row, col),), []).append((row.truth, row.estimate))
    for key, points in series.items():
        points.sort()
        targets = [x for x, _ in points]
        if len(set(targets)) != len(targets):
            raise SchemaError(
                f"required_n_curve: duplicate error target for {col}={_fmt(key[0])} "
                f"in {spec.input_path}"
            )
    return dict(sorted(series.items(), key=lambda item: item[0]))


def _draw(spec: FigureSpec, groups: dict) -> bytes:
    fmt = os.path.splitext(spec.out_path)[1].lower().lstrip(".")
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        try:
            if spec.kind == "boxplot_by_param":
                _draw_boxes_single(spec, ax, groups)
            elif spec.kind == "boxplot_by_method":
                _draw_boxes_paired(spec, ax, groups)
            else:
                _draw_curve(spec, ax, groups)
            if spec.logy:
                ax.set_yscale("log")
            if spec.title is not None:
                ax.set_title(spec.title)
            ax.grid(True, axis="y", alpha=0.3)
            fig.tight_layout()
            buffer = io.BytesIO()
            if fmt == "svg":
                fig.savefig(buffer, format="svg", metadata={"Date": None})
            else:
                fig.savefig(buffer, format="png", dpi=_DPI)
        finally:
            plt.close(fig)
    return buffer.getvalue()


def _draw_boxes_single(spec: FigureSpec, ax, groups: dict) -> None:
    keys = list(groups)
    boxes = ax.boxplot(
        [groups[key] for key in keys],
        positions=range(len(keys)),
        widths=0.6,
        patch_artist=True,
    )
    for patch in boxes["boxes"]:
        patch.set_facecolor(_PALETTE[0])
    for median in boxes["medians"]:
        median.set_color("black")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels([_fmt(key[0]) for key in keys])
    ax.set_xlabel(spec.xlabel if spec.xlabel is not None else spec.group_columns[0])
    ax.set_ylabel(spec.ylabel if spec.ylabel is not None else "absolute error")


def _draw_boxes_paired(spec: FigureSpec, ax, groups: dict) -> None:
    primaries = sorted({key[0] for key in groups})
    secondaries = sorted({key[1] for key in groups})
    slot = len(secondaries) + 1
    positions: list[int] = []
    samples: list[list[float]] = []
    colors: list[str] = []
    for i, primary in enumerate(primaries):
        for j, secondary in enumerate(secondaries):
            key = (primary, secondary)
            if key not in groups:
                continue
            positions.append(i * slot + j)
            samples.append(groups[key])
            colors.append(_PALETTE[j % len(_PALETTE)])
    boxes = ax.boxplot(samples, positions=positions, widths=0.8, patch_artist=True)
    for patch, color in zip(boxes["boxes"], colors):
        patch.set_facecolor(color)
    for median in boxes["medians"]:
        median.set_color("black")
    centers = [i * slot + (len(secondaries) - 1) / 2 for i in range(len(primaries))]
    ax.set_xticks(centers)
    ax.set_xticklabels([_fmt(p) for p in primaries])
    handles = [
        Patch(facecolor=_PALETTE[j % len(_PALETTE)], label=_fmt(s))
        for j, s in enumerate(secondaries)
    ]
    ax.legend(handles=handles, loc="upper left", title=spec.group_columns[1])
    ax.set_xlabel(spec.xlabel if spec.xlabel is not None else spec.group_columns[0])
    ax.set_ylabel(spec.ylabel if spec.ylabel is not None else "absolute error")


def _draw_curve(spec: FigureSpec, ax, series: dict) -> None:
    col = spec.group_columns[0]
    for j, (key, points) in enumerate(series.items()):
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        ax.plot(
            xs,
            ys,
            marker="o",
            color=_PALETTE[j % len(_PALETTE)],
            label=f"{col}={_fmt(key[0])}",
        )
    ax.legend(loc="upper right")
    ax.set_xlabel(spec.xlabel if spec.xlabel is not None else "error target")
    ax.set_ylabel(spec.ylabel if spec.ylabel is not None else "required n")
