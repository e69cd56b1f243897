"""Labeled time series: generation, sliding windows, statistics, text rendering, CSV I/O."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .faults import GroundTruth, apply_drift, apply_faults, impacts_at, label
from .scenarios import Scenario
from .sim import CHANNELS, SimConfig, initial_state, make_rng, step_nominal

LABEL_COLUMNS = ("anomaly", "leak", "comp", "filter")
HEADER = ("t",) + CHANNELS + LABEL_COLUMNS


class DataError(ValueError):
    """Malformed or inconsistent data file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DataFormatError(DataError):
    pass


class DataValidationError(DataError):
    pass


@dataclass(frozen=True)
class SensorRecord:
    timestamp: int
    values: dict[str, float]
    truth: GroundTruth


class TimeSeries:
    """Immutable hourly series of the nine channels plus per-hour ground truth.

    ``values`` has shape (N, 9) in :data:`CHANNELS` order; ``labels`` has shape
    (N, 4) in :data:`LABEL_COLUMNS` order.
    """

    def __init__(self, timestamps, values, labels):
        timestamps = np.asarray(timestamps, dtype=np.int64)
        values = np.asarray(values, dtype=float).reshape(-1, len(CHANNELS))
        labels = np.asarray(labels, dtype=bool).reshape(-1, len(LABEL_COLUMNS))
        if not (len(timestamps) == len(values) == len(labels)):
            raise DataValidationError("timestamps, values and labels differ in length")
        if len(timestamps) > 1 and not np.all(np.diff(timestamps) == 1):
            bad = int(np.argmax(np.diff(timestamps) != 1)) + 1
            raise DataValidationError(f"timestamps must increase by exactly 1 (row {bad})")
        if np.any(labels[:, 0] != labels[:, 1:].any(axis=1)):
            raise DataValidationError("anomaly label must equal the OR of the fault labels")
        for arr in (timestamps, values, labels):
            arr.setflags(write=False)
        self.timestamps = timestamps
        self.values = values
        self.labels = labels

    def __len__(self) -> int:
        return len(self.timestamps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.labels, other.labels)
        )

    def __repr__(self) -> str:
        if not len(self):
            return "TimeSeries(empty)"
        return f"TimeSeries(t={self.timestamps[0]}..{self.timestamps[-1]}, n={len(self)})"

    def slice(self, start: int, stop: int) -> "TimeSeries":
        """Rows by position, ``start`` inclusive, ``stop`` exclusive."""
        return TimeSeries(self.timestamps[start:stop], self.values[start:stop], self.labels[start:stop])

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, CHANNELS.index(name)]

    def truth(self, i: int) -> GroundTruth:
        return GroundTruth(*(bool(x) for x in self.labels[i]))

    def record(self, i: int) -> SensorRecord:
        return SensorRecord(
            int(self.timestamps[i]),
            {c: float(v) for c, v in zip(CHANNELS, self.values[i])},
            self.truth(i),
        )

    @property
    def records(self) -> list[SensorRecord]:
        return [self.record(i) for i in range(len(self))]

    @property
    def anomaly(self) -> np.ndarray:
        return self.labels[:, 0]


def run_scenario(cfg: SimConfig | Scenario, faults=(), drifts=(), label_threshold: float = 0.01) -> TimeSeries:
    """Integrate the plant hour by hour with faults, drift and labels applied.

    Indoor temperature evolves under the post-fault cooling output, so
    cooling faults feed back into the thermal state.
    """
    if isinstance(cfg, Scenario):
        faults, drifts, label_threshold = cfg.faults, cfg.drifts, cfg.label_threshold
        cfg = cfg.config
    cfg.validate()
    n = int(cfg.duration_hours)
    rng = make_rng(cfg)
    values = np.empty((n, len(CHANNELS)))
    labels = np.empty((n, len(LABEL_COLUMNS)), dtype=bool)
    drift_idx = [(CHANNELS.index(d.channel), d) for d in drifts]

    nominal = initial_state(cfg, rng)
    faulted = None
    for t in range(n):
        if t > 0:
            nominal = step_nominal(cfg, nominal, rng, q_cool_effective=faulted.q_cool)
        impacts = impacts_at(faults, t)
        faulted = apply_faults(nominal, impacts)
        row = list(faulted.values())
        for j, d in drift_idx:
            row[j] = apply_drift(row[j], d, t)
        values[t] = row
        truth = label(impacts, label_threshold)
        labels[t] = (truth.anomaly, truth.leak_active, truth.comp_active, truth.filter_active)
    return TimeSeries(np.arange(n), values, labels)


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class WindowView:
    """``size`` consecutive rows of ``series`` ending at row position ``end``."""

    series: TimeSeries
    end: int
    size: int

    @property
    def history(self) -> TimeSeries:
        return self.series.slice(self.end - self.size + 1, self.end + 1)

    @property
    def values(self) -> np.ndarray:
        return self.series.values[self.end - self.size + 1 : self.end + 1]

    @property
    def timestamps(self) -> np.ndarray:
        return self.series.timestamps[self.end - self.size + 1 : self.end + 1]

    @property
    def latest(self) -> SensorRecord:
        return self.series.record(self.end)

    @property
    def t(self) -> int:
        return int(self.series.timestamps[self.end])

    @property
    def truth(self) -> GroundTruth:
        return self.series.truth(self.end)


def windows(series: TimeSeries, window_size: int, stride: int = 1) -> list[WindowView]:
    if window_size < 2:
        raise ValueError("window_size must be >= 2")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    return [WindowView(series, end, window_size) for end in range(window_size - 1, len(series), stride)]


def last_window(series: TimeSeries, window_size: int) -> WindowView:
    size = min(window_size, len(series))
    return WindowView(series, len(series) - 1, size)


# ---------------------------------------------------------------------------
# statistics


class Trend(str, enum.Enum):
    RISING = "rising"
    FALLING = "falling"
    STABLE = "stable"


@dataclass(frozen=True)
class ChannelStats:
    min: float
    max: float
    mean: float
    std: float
    median: float
    p25: float
    p75: float
    trend: Trend


WindowStats = dict  # channel name -> ChannelStats


def trend_of(x: np.ndarray, std: float | None = None) -> Trend:
    """Sign of the least-squares slope; near-zero slopes relative to spread count as stable."""
    n = len(x)
    if n < 2:
        return Trend.STABLE
    idx = np.arange(n, dtype=float)
    idx -= idx.mean()
    slope = float(np.dot(idx, x - x.mean()) / np.dot(idx, idx))
    if std is None:
        std = float(np.std(x))
    if abs(slope) <= 1e-6 * (std + 1e-12):
        return Trend.STABLE
    return Trend.RISING if slope > 0 else Trend.FALLING


def channel_stats(x) -> ChannelStats:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("cannot summarize an empty window")
    p25, median, p75 = np.percentile(x, [25, 50, 75])
    std = float(np.std(x))
    return ChannelStats(
        min=float(x.min()),
        max=float(x.max()),
        mean=float(x.mean()),
        std=std,
        median=float(median),
        p25=float(p25),
        p75=float(p75),
        trend=trend_of(x, std),
    )


def compute_stats(window: WindowView | TimeSeries | np.ndarray) -> WindowStats:
    values = window if isinstance(window, np.ndarray) else window.values
    return {c: channel_stats(values[:, j]) for j, c in enumerate(CHANNELS)}


# ---------------------------------------------------------------------------
# reference segment


def clean_prefix_length(series: TimeSeries) -> int:
    hits = np.flatnonzero(series.anomaly)
    return int(hits[0]) if hits.size else len(series)


def reference_segment(series: TimeSeries, min_hours: int = 48, length: int | None = None) -> TimeSeries:
    """Fault-free slice used for calibration / comparison.

    Default is the longest label-clean prefix; ``length`` truncates it to the
    last ``length`` clean hours.
    """
    n = clean_prefix_length(series)
    if n < min_hours:
        raise DataValidationError(f"label-clean prefix is {n} h, need at least {min_hours} h")
    start = 0 if length is None else max(0, n - length)
    return series.slice(start, n)


@dataclass(frozen=True)
class Reference:
    window: WindowView
    stats: WindowStats


def make_reference(series: TimeSeries, window_size: int, min_hours: int = 48) -> Reference:
    """Last ``window_size`` hours of the clean prefix, the same shape as an input window."""
    seg = reference_segment(series, min_hours=min_hours)
    view = last_window(seg, window_size)
    return Reference(view, compute_stats(view))


# ---------------------------------------------------------------------------
# rendering


class DataMode(str, enum.Enum):
    NONE = "none"
    RAW = "raw"
    STATS = "stats"
    BOTH = "both"

    @classmethod
    def parse(cls, name) -> "DataMode":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace(" ", "_")
        aliases = {
            "raw_data": cls.RAW,
            "rawdata": cls.RAW,
            "statistics": cls.STATS,
            "descriptive_statistics": cls.STATS,
            "na": cls.NONE,
        }
        return aliases.get(key) or cls(key)

    @property
    def has_raw(self) -> bool:
        return self in (DataMode.RAW, DataMode.BOTH)

    @property
    def has_stats(self) -> bool:
        return self in (DataMode.STATS, DataMode.BOTH)


@dataclass(frozen=True)
class Representation:
    mode: DataMode = DataMode.STATS
    reference_mode: DataMode = DataMode.NONE

    def __post_init__(self):
        object.__setattr__(self, "mode", DataMode.parse(self.mode))
        object.__setattr__(self, "reference_mode", DataMode.parse(self.reference_mode))
        if self.mode is DataMode.NONE:
            raise ValueError("input representation cannot be 'none'")


@dataclass(frozen=True)
class RenderedBlocks:
    sensor_data: str = ""
    statistics: str = ""
    reference_data: str = ""
    reference_statistics: str = ""


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_table(view: WindowView) -> str:
    lines = [",".join(("t",) + CHANNELS)]
    for ts, row in zip(view.timestamps, view.values):
        lines.append(",".join([str(int(ts))] + [_fmt(v) for v in row]))
    return "\n".join(lines)


def render_stats(stats: WindowStats) -> str:
    lines = []
    for c in CHANNELS:
        s = stats[c]
        lines.append(
            f"{c}: min={_fmt(s.min)}, max={_fmt(s.max)}, mean={_fmt(s.mean)}, std={_fmt(s.std)}, "
            f"median={_fmt(s.median)}, p25={_fmt(s.p25)}, p75={_fmt(s.p75)}, trend={s.trend.value}"
        )
    return "\n".join(lines)


def render(
    window: WindowView,
    stats: WindowStats,
    representation: Representation,
    reference: Reference | None = None,
) -> RenderedBlocks:
    if (reference is None) != (representation.reference_mode is DataMode.NONE):
        raise ValueError("reference must be given exactly when reference_mode is not 'none'")
    ref_mode = representation.reference_mode
    return RenderedBlocks(
        sensor_data=render_table(window) if representation.mode.has_raw else "",
        statistics=render_stats(stats) if representation.mode.has_stats else "",
        reference_data=render_table(reference.window) if ref_mode.has_raw else "",
        reference_statistics=render_stats(reference.stats) if ref_mode.has_stats else "",
    )


# ---------------------------------------------------------------------------
# CSV I/O


def export_csv(series: TimeSeries, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for i in range(len(series)):
        writer.writerow(
            [str(int(series.timestamps[i]))]
            + [repr(float(v)) for v in series.values[i]]
            + ["1" if b else "0" for b in series.labels[i]]
        )
    Path(path).write_text(buf.getvalue())


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"column {column}: not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise DataFormatError(f"column {column}: non-finite value {text!r}", line)
    return value


def _parse_bool(text: str, line: int, column: str) -> bool:
    if text.strip() in ("0", "1"):
        return text.strip() == "1"
    raise DataFormatError(f"column {column}: expected 0 or 1, got {text!r}", line)


def import_csv(path) -> TimeSeries:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError("empty file", 1)
    header = tuple(h.strip() for h in rows[0])
    missing = [h for h in HEADER if h not in header]
    if missing:
        raise DataFormatError(f"missing column(s): {', '.join(missing)}", 1)
    extra = [h for h in header if h not in HEADER]
    if extra:
        raise DataFormatError(f"unexpected column(s): {', '.join(extra)}", 1)
    pos = {h: header.index(h) for h in HEADER}

    timestamps, values, labels = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataFormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            ts = int(row[pos["t"]])
        except ValueError:
            raise DataFormatError(f"column t: not an integer: {row[pos['t']]!r}", lineno) from None
        if timestamps and ts != timestamps[-1] + 1:
            raise DataValidationError(f"timestamp {ts} does not follow {timestamps[-1]}", lineno)
        flags = [_parse_bool(row[pos[c]], lineno, c) for c in LABEL_COLUMNS]
        if flags[0] != any(flags[1:]):
            raise DataValidationError("anomaly label disagrees with fault labels", lineno)
        timestamps.append(ts)
        values.append([_parse_float(row[pos[c]], lineno, c) for c in CHANNELS])
        labels.append(flags)
    return TimeSeries(timestamps, values, labels)
