"""Evaluate / feedback / update cycles with prompt-based memory.

The timeline is cut into consecutive cycles of ``cycle_length`` hours by the
hour of each window's latest row.  Every window of cycle k sees the memory as
it stood at the end of cycle k-1; afterwards the cycle's examples (model
verdict plus ground-truth label) are appended, oldest evicted past
``memory_cap``.  Only the anomaly stage runs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .agents.pipeline import AgentConfig, run_agent
from .agents.providers import CompletionProvider
from .dataset import Reference, TimeSeries, compute_stats, render_stats, windows

DEFAULT_MEMORY_CAP = 48


@dataclass(frozen=True)
class FeedbackExample:
    cycle: int
    window_summary: str
    predicted: bool
    actual: bool
    model_explanation: str = ""

    def __post_init__(self):
        if self.cycle < 0:
            raise ValueError("cycle must be >= 0")


def _yes_no(flag: bool) -> str:
    return "anomaly" if flag else "normal"


def render_feedback(memory: Sequence[FeedbackExample]) -> str:
    """Oldest first."""
    blocks = []
    for i, ex in enumerate(memory, start=1):
        blocks.append(
            f"Example {i} (cycle {ex.cycle}):\n{ex.window_summary}\n"
            f"Model prediction: {_yes_no(ex.predicted)}\n"
            f"Expert-corrected label: {_yes_no(ex.actual)}"
        )
    return "\n\n".join(blocks)


@dataclass
class CycleReport:
    cycle: int
    accuracy: float
    n_windows: int
    n_failed: int
    feedback_memory_size: int
    records: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def run_cycles(
    series: TimeSeries,
    cfg: AgentConfig,
    provider: CompletionProvider,
    cycle_length: int = 24,
    memory_cap: int = DEFAULT_MEMORY_CAP,
    reference: Reference | None = None,
    keep_results: list | None = None,
) -> list[CycleReport]:
    """``keep_results``, if given, collects every cycle's WindowResult list (transcripts, audits)."""
    if cycle_length < cfg.window_size:
        raise ValueError("cycle_length must be >= window_size")
    if memory_cap < 0:
        raise ValueError("memory_cap must be >= 0")
    if len(series) < 2 * cycle_length:
        raise ValueError("series must cover at least two cycles")

    t_first = int(series.timestamps[0])
    n_cycles = -(-len(series) // cycle_length)
    by_cycle: list[list] = [[] for _ in range(n_cycles)]
    for view in windows(series, cfg.window_size, 1):
        by_cycle[(view.t - t_first) // cycle_length].append(view)

    memory: list[FeedbackExample] = []
    reports = []
    for k, views in enumerate(by_cycle):
        feedback = render_feedback(memory) if memory_cap > 0 else ""
        results = run_agent(series, cfg, provider, reference, views=views, run_faults=False, feedback=feedback)
        if keep_results is not None:
            keep_results.append(results)
        new_examples, records = [], []
        correct = evaluated = failed = 0
        for view, res in zip(views, results):
            actual = view.truth.anomaly
            pred = res.predicted_anomaly
            records.append({"t": view.t, "predicted": pred, "actual": actual, "failed": res.failed, "errors": res.errors})
            if pred is None:
                failed += 1
                continue
            evaluated += 1
            correct += pred == actual
            new_examples.append(
                FeedbackExample(k, render_stats(compute_stats(view)), pred, actual, res.detection.explanation)
            )
        if memory_cap > 0:
            memory = (memory + new_examples)[-memory_cap:]
        reports.append(
            CycleReport(
                cycle=k,
                accuracy=correct / evaluated if evaluated else 0.0,
                n_windows=len(views),
                n_failed=failed,
                feedback_memory_size=len(memory),
                records=records,
            )
        )
    return reports


def write_cycle_outputs(reports: Sequence[CycleReport], out_dir) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"json": out_dir / "cycles.json", "csv": out_dir / "accuracy.csv"}
    paths["json"].write_text(json.dumps([r.to_dict() for r in reports], indent=2))
    lines = ["cycle,accuracy,n_windows,n_failed,memory_size"]
    lines += [f"{r.cycle},{r.accuracy!r},{r.n_windows},{r.n_failed},{r.feedback_memory_size}" for r in reports]
    paths["csv"].write_text("\n".join(lines) + "\n")
    return paths
