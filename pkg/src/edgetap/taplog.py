"""Tap-log ingestion, outlier filtering, and per-condition aggregation.

File formats
------------
CSV (header required)::

    participant,size_x_mm,size_y_mm,margin_x_mm,margin_y_mm,edge_x,edge_y,tap_x_mm,tap_y_mm,repetition

with ``edge_x``/``edge_y`` in {neg, pos, none}. JSONL mirrors the field
names, one object per line. Tap coordinates are millimetres relative to the
target center.

Constants JSON: per-axis objects ``{c,d,e,f,g,h,i,j,k,l,variance_target,
baseline:{a,b}}`` under keys ``x`` and ``y``, plus top-level ``preset_name``
and ``source``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .predictor import (
    AxisConstants,
    AxisGeometry,
    BaselineConstants,
    EdgeSide,
    ModelConstants,
    TargetLayout,
    VarianceTarget,
)
from .skewnormal import MomentParams

__all__ = [
    "ParseError",
    "LogFormat",
    "AggregationMode",
    "TapTrial",
    "ConditionAggregate",
    "FilterWarning",
    "parse_tap_log",
    "write_tap_log",
    "filter_outliers_3sd",
    "filter_outliers_iqr",
    "aggregate",
    "layout_key",
    "constants_to_dict",
    "constants_from_dict",
    "load_constants",
    "save_constants",
]

CSV_FIELDS = [
    "participant",
    "size_x_mm",
    "size_y_mm",
    "margin_x_mm",
    "margin_y_mm",
    "edge_x",
    "edge_y",
    "tap_x_mm",
    "tap_y_mm",
    "repetition",
]


class ParseError(ValueError):
    """Malformed tap-log input; carries line number and field name."""

    def __init__(self, line: int, fld: str, message: str):
        super().__init__(f"line {line}, field {fld}: {message}")
        self.line = line
        self.field = fld


class LogFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"


class AggregationMode(str, Enum):
    #: moments per participant per condition, then averaged across participants
    PER_PARTICIPANT = "per-participant"
    #: all trials of a condition pooled into one distribution
    POOLED = "pooled"


@dataclass(frozen=True)
class TapTrial:
    participant: str
    layout: TargetLayout
    tap_x: float
    tap_y: float
    repetition: int


@dataclass(frozen=True)
class ConditionAggregate:
    layout: TargetLayout
    n: int
    moments_x: MomentParams
    moments_y: MomentParams
    observed_sr: float
    observed_sr_x: float
    observed_sr_y: float


@dataclass(frozen=True)
class FilterWarning:
    participant: str
    layout: TargetLayout
    message: str


def layout_key(layout: TargetLayout) -> tuple:
    """Hashable, sortable identity of a target condition."""
    ax, ay = layout.axis_x, layout.axis_y
    return (
        ax.size, ax.margin, ax.edge_side.value,
        ay.size, ay.margin, ay.edge_side.value,
    )


def _parse_row(row: dict, line: int) -> TapTrial:
    def num(fld: str) -> float:
        raw = row.get(fld)
        if raw is None or raw == "":
            raise ParseError(line, fld, "missing value")
        try:
            v = float(raw)
        except (TypeError, ValueError):
            raise ParseError(line, fld, f"not a number: {raw!r}") from None
        if not math.isfinite(v):
            raise ParseError(line, fld, f"not finite: {raw!r}")
        return v

    def edge(fld: str) -> EdgeSide:
        raw = row.get(fld)
        try:
            return EdgeSide(raw)
        except ValueError:
            raise ParseError(line, fld, f"expected neg/pos/none, got {raw!r}") from None

    participant = row.get("participant")
    if not participant:
        raise ParseError(line, "participant", "missing value")
    try:
        layout = TargetLayout(
            axis_x=AxisGeometry(num("size_x_mm"), num("margin_x_mm"), edge("edge_x")),
            axis_y=AxisGeometry(num("size_y_mm"), num("margin_y_mm"), edge("edge_y")),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(line, "layout", str(exc)) from None
    rep_raw = row.get("repetition")
    try:
        repetition = int(rep_raw)
    except (TypeError, ValueError):
        raise ParseError(line, "repetition", f"not an integer: {rep_raw!r}") from None
    return TapTrial(str(participant), layout, num("tap_x_mm"), num("tap_y_mm"), repetition)


def parse_tap_log(stream, fmt: LogFormat = LogFormat.CSV) -> list[TapTrial]:
    """Parse a tap log from a byte or text stream. No silent row drops."""
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if hasattr(stream, "read") and "b" in getattr(stream, "mode", "b"):
        data = stream.read()
        if isinstance(data, bytes):
            stream = io.StringIO(data.decode("utf-8"))
        else:
            stream = io.StringIO(data)
    trials: list[TapTrial] = []
    if fmt is LogFormat.CSV:
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            return []
        missing = [f for f in CSV_FIELDS if f not in reader.fieldnames]
        if missing:
            raise ParseError(1, missing[0], "missing column in header")
        for row in reader:
            trials.append(_parse_row(row, reader.line_num))
    else:
        for line_no, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, "record", f"invalid JSON: {exc.msg}") from None
            if not isinstance(row, dict):
                raise ParseError(line_no, "record", "expected a JSON object")
            trials.append(_parse_row(row, line_no))
    return trials


def write_tap_log(trials: list[TapTrial], stream, fmt: LogFormat = LogFormat.CSV) -> None:
    """Write trials in the tap-log schema with full float precision."""
    if fmt is LogFormat.CSV:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for t in trials:
            ax, ay = t.layout.axis_x, t.layout.axis_y
            writer.writerow([
                t.participant,
                repr(ax.size), repr(ay.size),
                repr(ax.margin), repr(ay.margin),
                ax.edge_side.value, ay.edge_side.value,
                repr(t.tap_x), repr(t.tap_y),
                t.repetition,
            ])
    else:
        for t in trials:
            ax, ay = t.layout.axis_x, t.layout.axis_y
            stream.write(json.dumps({
                "participant": t.participant,
                "size_x_mm": ax.size, "size_y_mm": ay.size,
                "margin_x_mm": ax.margin, "margin_y_mm": ay.margin,
                "edge_x": ax.edge_side.value, "edge_y": ay.edge_side.value,
                "tap_x_mm": t.tap_x, "tap_y_mm": t.tap_y,
                "repetition": t.repetition,
            }, sort_keys=True) + "\n")


def _group_trials(trials: list[TapTrial]) -> dict[tuple, list[TapTrial]]:
    groups: dict[tuple, list[TapTrial]] = {}
    for t in trials:
        groups.setdefault((t.participant,) + layout_key(t.layout), []).append(t)
    return groups


def _filter_by_fence(
    trials: list[TapTrial],
    fence_fn,
) -> tuple[list[TapTrial], list[TapTrial], list[FilterWarning]]:
    """Shared single-pass filter. ``fence_fn(values) -> (lo, hi)`` per axis.

    A trial is removed if either axis coordinate falls outside its fence.
    Order of kept/removed follows the input order.
    """
    groups = _group_trials(trials)
    warnings: list[FilterWarning] = []
    drop: set[int] = set()
    for key in sorted(groups):
        members = groups[key]
        if len(members) < 2:
            warnings.append(FilterWarning(
                participant=members[0].participant,
                layout=members[0].layout,
                message=f"group has n={len(members)} < 2; skipped",
            ))
            continue
        xs = np.array([t.tap_x for t in members])
        ys = np.array([t.tap_y for t in members])
        lo_x, hi_x = fence_fn(xs)
        lo_y, hi_y = fence_fn(ys)
        for t in members:
            if not (lo_x <= t.tap_x <= hi_x and lo_y <= t.tap_y <= hi_y):
                drop.add(id(t))
    kept = [t for t in trials if id(t) not in drop]
    removed = [t for t in trials if id(t) in drop]
    return kept, removed, warnings


def filter_outliers_3sd(trials: list[TapTrial]):
    """Remove trials more than 3 SD from the per-participant group mean."""

    def fence(v: np.ndarray) -> tuple[float, float]:
        m = float(np.mean(v))
        sd = float(np.std(v, ddof=1))
        return m - 3.0 * sd, m + 3.0 * sd

    return _filter_by_fence(trials, fence)


def filter_outliers_iqr(trials: list[TapTrial], k: float = 3.0):
    """Remove trials beyond k * IQR outside the quartiles (linear interp)."""

    def fence(v: np.ndarray) -> tuple[float, float]:
        q1, q3 = np.percentile(v, [25.0, 75.0])
        iqr = q3 - q1
        return float(q1 - k * iqr), float(q3 + k * iqr)

    return _filter_by_fence(trials, fence)


def _moment_stats(xs: np.ndarray, adjusted: bool = False) -> tuple[float, float, float]:
    """(mean, sample variance, moment skewness b1 = m3 / m2^1.5)."""
    n = len(xs)
    mean = float(np.mean(xs))
    var = float(np.var(xs, ddof=1))
    centered = xs - mean
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    if m2 <= 0.0:
        return mean, var, 0.0
    g1 = m3 / m2**1.5
    if adjusted and n > 2:
        g1 *= math.sqrt(n * (n - 1)) / (n - 2)
    return mean, var, g1


def _sr_fractions(xs: np.ndarray, ys: np.ndarray, layout: TargetLayout) -> tuple[float, float, float]:
    in_x = np.abs(xs) <= 0.5 * layout.axis_x.size
    in_y = np.abs(ys) <= 0.5 * layout.axis_y.size
    return float(np.mean(in_x & in_y)), float(np.mean(in_x)), float(np.mean(in_y))


def aggregate(
    trials: list[TapTrial],
    mode: AggregationMode = AggregationMode.PER_PARTICIPANT,
    adjusted_skewness: bool = False,
    min_per_participant: int = 3,
) -> tuple[list[ConditionAggregate], list[FilterWarning]]:
    """Collapse trials into per-condition moments and observed success rates.

    PER_PARTICIPANT computes moments and success fractions per participant
    per condition and averages them across participants; POOLED treats each
    condition's trials as a single distribution.
    """
    by_condition: dict[tuple, list[TapTrial]] = {}
    layouts: dict[tuple, TargetLayout] = {}
    for t in trials:
        key = layout_key(t.layout)
        by_condition.setdefault(key, []).append(t)
        layouts.setdefault(key, t.layout)

    aggs: list[ConditionAggregate] = []
    warnings: list[FilterWarning] = []
    for key in sorted(by_condition):
        members = by_condition[key]
        layout = layouts[key]
        if mode is AggregationMode.POOLED:
            xs = np.array([t.tap_x for t in members])
            ys = np.array([t.tap_y for t in members])
            if len(xs) < 2:
                warnings.append(FilterWarning("*", layout, f"condition has n={len(xs)} < 2; skipped"))
                continue
            mx = _moment_stats(xs, adjusted_skewness)
            my = _moment_stats(ys, adjusted_skewness)
            sr, sr_x, sr_y = _sr_fractions(xs, ys, layout)
            n = len(xs)
        else:
            per_part: dict[str, list[TapTrial]] = {}
            for t in members:
                per_part.setdefault(t.participant, []).append(t)
            rows = []
            n = 0
            for pid in sorted(per_part):
                pts = per_part[pid]
                if len(pts) < min_per_participant:
                    warnings.append(FilterWarning(
                        pid, layout,
                        f"participant has n={len(pts)} < {min_per_participant}; excluded",
                    ))
                    continue
                xs = np.array([t.tap_x for t in pts])
                ys = np.array([t.tap_y for t in pts])
                rows.append(_moment_stats(xs, adjusted_skewness)
                            + _moment_stats(ys, adjusted_skewness)
                            + _sr_fractions(xs, ys, layout))
                n += len(pts)
            if not rows:
                warnings.append(FilterWarning("*", layout, "no participant met the trial minimum"))
                continue
            means = np.mean(np.array(rows), axis=0)
            mx = tuple(means[0:3])
            my = tuple(means[3:6])
            sr, sr_x, sr_y = means[6], means[7], means[8]
        if mx[1] <= 0.0 or my[1] <= 0.0:
            warnings.append(FilterWarning("*", layout, "zero variance; skipped"))
            continue
        aggs.append(ConditionAggregate(
            layout=layout,
            n=n,
            moments_x=MomentParams(mu=mx[0], sigma2=mx[1], gamma1=mx[2]),
            moments_y=MomentParams(mu=my[0], sigma2=my[1], gamma1=my[2]),
            observed_sr=float(sr),
            observed_sr_x=float(sr_x),
            observed_sr_y=float(sr_y),
        ))
    return aggs, warnings


# -- constants JSON -----------------------------------------------------------

def _axis_to_dict(k: AxisConstants) -> dict:
    d = {
        "c": k.c, "d": k.d, "e": k.e, "f": k.f, "g": k.g,
        "h": k.h, "i": k.i, "j": k.j, "k": k.k, "l": k.l,
        "variance_target": k.variance_target.value,
    }
    if k.baseline is not None:
        d["baseline"] = {"a": k.baseline.a, "b": k.baseline.b}
    return d


def _axis_from_dict(d: dict) -> AxisConstants:
    baseline = None
    if "baseline" in d:
        a, b = float(d["baseline"]["a"]), float(d["baseline"]["b"])
        # Some shipped presets publish (a, b) swapped; the flag keeps the
        # stored values verbatim and fixes the interpretation on load.
        if d["baseline"].get("transposed", False):
            a, b = b, a
        baseline = BaselineConstants(a=a, b=b)
    return AxisConstants(
        c=float(d["c"]), d=float(d["d"]), e=float(d["e"]), f=float(d["f"]),
        g=float(d["g"]), h=float(d["h"]), i=float(d["i"]), j=float(d["j"]),
        k=float(d["k"]), l=float(d["l"]),
        variance_target=VarianceTarget(d.get("variance_target", "sigma2")),
        baseline=baseline,
    )


def constants_to_dict(k: ModelConstants, preset_name: str = "", source: str = "") -> dict:
    return {
        "preset_name": preset_name,
        "source": source,
        "x": _axis_to_dict(k.x),
        "y": _axis_to_dict(k.y),
    }


def constants_from_dict(d: dict) -> ModelConstants:
    return ModelConstants(x=_axis_from_dict(d["x"]), y=_axis_from_dict(d["y"]))


def load_constants(path) -> ModelConstants:
    with open(path, encoding="utf-8") as fh:
        return constants_from_dict(json.load(fh))


def save_constants(k: ModelConstants, path, preset_name: str = "", source: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(constants_to_dict(k, preset_name, source), fh, indent=2, sort_keys=True)
        fh.write("\n")
