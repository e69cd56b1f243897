"""Scoring against ground truth and experiment grids over detector settings.

Anomaly is the positive class.  Fault classification is micro-averaged over
the pooled (fault, window) decisions; per-fault and macro numbers are kept
alongside.  Windows where stage 1 was negative count as all-false fault
calls.  Evaluation-failed windows (``None`` predictions) never enter the
confusion counts; they are tallied in ``n_failed``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import yaml

from .agents.pipeline import AgentConfig, Architecture, run_agent
from .agents.providers import CompletionProvider
from .baseline import calibrate, classify_fault, detect_anomaly
from .dataset import Representation, TimeSeries, make_reference, reference_segment, windows
from .faults import GroundTruth
from .sim import ConfigError
from .verdicts import WindowResult

FAULT_KEYS = ("leak", "compressor", "filter")


@dataclass(frozen=True)
class MetricsReport:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    n_failed: int = 0

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int, n_failed: int = 0) -> "MetricsReport":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total = tp + fp + tn + fn
        accuracy = (tp + tn) / total if total else 0.0
        return cls(tp, fp, tn, fn, precision, recall, f1, accuracy, n_failed)

    def to_dict(self) -> dict:
        return asdict(self)


def _counts(pairs) -> tuple[int, int, int, int]:
    tp = fp = tn = fn = 0
    for p, t in pairs:
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def score_anomaly(predictions: Sequence[bool | None], truths: Sequence[bool]) -> MetricsReport:
    if len(predictions) != len(truths):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(truths)} truths")
    kept = [(bool(p), bool(t)) for p, t in zip(predictions, truths) if p is not None]
    return MetricsReport.from_counts(*_counts(kept), n_failed=len(predictions) - len(kept))


def _truth_flags(t) -> tuple[bool, bool, bool]:
    return t.flags() if isinstance(t, GroundTruth) else tuple(bool(x) for x in t)


def _call_flags(c):
    if c is None:
        return None
    return c.flags() if hasattr(c, "flags") else tuple(bool(x) for x in c)


def score_faults(calls: Sequence, truths: Sequence) -> MetricsReport:
    """Micro-averaged: each (fault, window) pair is one binary decision."""
    if len(calls) != len(truths):
        raise ValueError(f"length mismatch: {len(calls)} calls vs {len(truths)} truths")
    pairs = []
    failed = 0
    for c, t in zip(calls, truths):
        flags = _call_flags(c)
        if flags is None:
            failed += 1
            continue
        pairs.extend(zip(flags, _truth_flags(t)))
    return MetricsReport.from_counts(*_counts(pairs), n_failed=failed)


def fault_breakdown(calls: Sequence, truths: Sequence) -> dict[str, MetricsReport]:
    if len(calls) != len(truths):
        raise ValueError("length mismatch")
    out = {}
    for k, key in enumerate(FAULT_KEYS):
        preds = [None if _call_flags(c) is None else _call_flags(c)[k] for c in calls]
        out[key] = score_anomaly(preds, [_truth_flags(t)[k] for t in truths])
    return out


def macro_f1(breakdown: dict[str, MetricsReport]) -> float:
    return sum(r.f1 for r in breakdown.values()) / len(breakdown)


def truths_for(results: Sequence[WindowResult], series: TimeSeries) -> list[GroundTruth]:
    pos = {int(t): i for i, t in enumerate(series.timestamps)}
    return [series.truth(pos[r.t]) for r in results]


@dataclass(frozen=True)
class Scores:
    anomaly: MetricsReport
    faults: MetricsReport
    per_fault: dict[str, MetricsReport]

    def to_dict(self) -> dict:
        return {
            "anomaly": self.anomaly.to_dict(),
            "faults": self.faults.to_dict(),
            "faults_per_fault": {k: v.to_dict() for k, v in self.per_fault.items()},
            "faults_macro_f1": macro_f1(self.per_fault),
        }


def score_results(results: Sequence[WindowResult], series: TimeSeries) -> Scores:
    truths = truths_for(results, series)
    calls = [r.predicted_faults for r in results]
    return Scores(
        anomaly=score_anomaly([r.predicted_anomaly for r in results], [t.anomaly for t in truths]),
        faults=score_faults(calls, truths),
        per_fault=fault_breakdown(calls, truths),
    )


def run_rule(series: TimeSeries, window_size: int, stride: int = 1, reference: TimeSeries | None = None, min_reference_hours: int = 48) -> list[WindowResult]:
    """Rule baseline over every window, with the same stage gating as the agents."""
    profile = calibrate(reference if reference is not None else reference_segment(series, min_reference_hours))
    out = []
    for view in windows(series, window_size, stride):
        det = detect_anomaly(view, profile)
        call = classify_fault(view, profile) if det.anomalous else None
        out.append(WindowResult(t=view.t, detection=det, fault_call=call))
    return out


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridCell:
    detector: str = "agent"  # "agent" or "rule"
    model_name: str = "gpt-4o"
    representation: str = "stats"
    reference_mode: str = "none"
    window_size: int = 36
    architecture: str = "centralized"

    def __post_init__(self):
        if self.detector not in ("agent", "rule"):
            raise ConfigError("detector", f"unknown detector {self.detector!r}")
        try:
            Representation(self.representation, self.reference_mode)
            Architecture(self.architecture)
        except ValueError as exc:
            raise ConfigError("cell", str(exc)) from None

    def label(self) -> str:
        if self.detector == "rule":
            return f"rule w={self.window_size}"
        return (
            f"{self.model_name} repr={self.representation} ref={self.reference_mode} "
            f"w={self.window_size} arch={self.architecture}"
        )


@dataclass(frozen=True)
class ExperimentGrid:
    cells: tuple[GridCell, ...]
    stride: int = 1
    sort_by: str = "anomaly"  # which F1 orders the table: "anomaly" or "faults"
    max_retries: int = 2
    max_in_flight: int = 4

    def __post_init__(self):
        if not self.cells:
            raise ConfigError("cells", "grid has no cells")
        if self.sort_by not in ("anomaly", "faults"):
            raise ConfigError("sort_by", "must be 'anomaly' or 'faults'")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentGrid":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "grid file must be a mapping")
        data = dict(data)
        raw_cells = list(data.pop("cells", None) or [])
        # "axes" expands to the cartesian product of the listed values
        axes = data.pop("axes", None)
        if axes:
            raw_cells.extend(_expand_axes(axes))
        allowed = {"stride", "sort_by", "max_retries", "max_in_flight"}
        for key in data:
            if key not in allowed:
                raise ConfigError(str(key), "unknown grid key")
        cells = []
        for raw in raw_cells:
            unknown = set(raw) - set(GridCell.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"cells.{sorted(unknown)[0]}", "unknown cell key")
            cells.append(GridCell(**raw))
        return cls(tuple(cells), **data)


def _expand_axes(axes: dict) -> list[dict]:
    combos = [{}]
    for key, values in axes.items():
        values = values if isinstance(values, list) else [values]
        combos = [dict(c, **{key: v}) for c in combos for v in values]
    return combos


def load_grid(path) -> ExperimentGrid:
    return ExperimentGrid.from_mapping(yaml.safe_load(Path(path).read_text()) or {})


@dataclass
class CellResult:
    cell: GridCell
    scores: Scores | None = None
    error: str = ""
    results: list[WindowResult] = field(default_factory=list, repr=False)

    def sort_key(self, by: str) -> float:
        if self.scores is None:
            return -1.0
        return (self.scores.anomaly if by == "anomaly" else self.scores.faults).f1


def run_cell(cell: GridCell, series: TimeSeries, provider: CompletionProvider | None, grid: ExperimentGrid) -> CellResult:
    if cell.detector == "rule":
        results = run_rule(series, cell.window_size, grid.stride)
    else:
        if provider is None:
            raise ConfigError("provider", "agent cells need a completion provider")
        cfg = AgentConfig(
            model_name=cell.model_name,
            architecture=Architecture(cell.architecture),
            representation=Representation(cell.representation, cell.reference_mode),
            window_size=cell.window_size,
            max_retries=grid.max_retries,
            max_in_flight=grid.max_in_flight,
        )
        reference = make_reference(series, cell.window_size) if cfg.needs_reference else None
        results = run_agent(series, cfg, provider, reference, stride=grid.stride)
    return CellResult(cell, score_results(results, series), results=results)


def run_grid(
    grid: ExperimentGrid,
    series: TimeSeries,
    provider: CompletionProvider | Callable[[GridCell], CompletionProvider] | None = None,
) -> list[CellResult]:
    """Evaluate every cell; failures are recorded per cell.  Sorted by descending F1 (stable)."""
    out = []
    for cell in grid.cells:
        prov = provider(cell) if callable(provider) and not hasattr(provider, "complete") else provider
        try:
            out.append(run_cell(cell, series, prov, grid))
        except Exception as exc:  # noqa: BLE001 - a bad cell must not stop the grid
            out.append(CellResult(cell, error=f"{type(exc).__name__}: {exc}"))
    return sorted(out, key=lambda r: -r.sort_key(grid.sort_by))


def format_table(results: Sequence[CellResult], task: str = "anomaly") -> str:
    header = ("Detector", "Model", "Data Repr.", "Reference Repr.", "Window", "Architecture", "Precision", "Recall", "F1-Score", "Accuracy", "Failed")
    rows = []
    for r in results:
        c = r.cell
        is_rule = c.detector == "rule"
        meta = [
            c.detector,
            "NA" if is_rule else c.model_name,
            "NA" if is_rule else c.representation,
            "NA" if is_rule else c.reference_mode,
            str(c.window_size),
            "NA" if is_rule else c.architecture,
        ]
        if r.scores is None:
            rows.append(meta + ["error", "", "", "", r.error])
            continue
        m = r.scores.anomaly if task == "anomaly" else r.scores.faults
        rows.append(meta + [f"{m.precision:.2f}", f"{m.recall:.2f}", f"{m.f1:.2f}", f"{m.accuracy:.2f}", str(m.n_failed)])
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(header)]
    line = lambda cols: " | ".join(col.ljust(w) for col, w in zip(cols, widths))  # noqa: E731
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), sep] + [line(row) for row in rows])


def write_grid_outputs(results: Sequence[CellResult], out_dir, sort_by: str = "anomaly") -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = [
        {"cell": asdict(r.cell), "error": r.error, "scores": None if r.scores is None else r.scores.to_dict()}
        for r in results
    ]
    paths = {
        "json": out_dir / "results.json",
        "anomaly_table": out_dir / "anomaly_table.txt",
        "fault_table": out_dir / "fault_table.txt",
        "csv": out_dir / "results.csv",
    }
    paths["json"].write_text(json.dumps({"sort_by": sort_by, "cells": payload}, indent=2))
    paths["anomaly_table"].write_text(format_table(results, "anomaly") + "\n")
    paths["fault_table"].write_text(format_table(results, "faults") + "\n")
    with open(paths["csv"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "task", "precision", "recall", "f1", "accuracy", "n_failed"])
        for r in results:
            if r.scores is None:
                continue
            for task, m in (("anomaly", r.scores.anomaly), ("faults", r.scores.faults)):
                w.writerow([r.cell.label(), task, m.precision, m.recall, m.f1, m.accuracy, m.n_failed])
    return paths

