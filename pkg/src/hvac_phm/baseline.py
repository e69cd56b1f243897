"""Statistical rule baseline calibrated on fault-free operation.

Anomaly rules (any channel, any rule fires):
  bound_min    min(window) < min(normal)
  bound_max    max(window) > max(normal)
  variability  std(window) > std(normal)
  trend_shift  |mean(second half) - mean(first half)| > 2 std(normal)

Fault rules compare the mean of the last ``FAULT_SPAN`` hours of the window
against mean +/- one std of normal operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import TimeSeries, WindowView
from .sim import CHANNELS
from .verdicts import Detection, FaultCall

FAULT_SPAN = 3

# (channel, direction): "low" means below mean - std, "high" above mean + std.
FAULT_RULES = {
    "leak": (("P_suct", "low"), ("Q_cool", "low"), ("P_comp", "high"), ("T_supply", "high")),
    "compressor": (("P_comp", "low"), ("Q_cool", "low"), ("P_suct", "high"), ("P_disc", "low")),
    "filter": (("Q_air", "low"), ("T_return", "high"), ("P_comp", "high")),
}


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class NormalProfile:
    min: dict[str, float]
    max: dict[str, float]
    mean: dict[str, float]
    std: dict[str, float]


def calibrate(reference: TimeSeries) -> NormalProfile:
    if len(reference) == 0:
        raise CalibrationError("reference series is empty")
    if reference.anomaly.any():
        bad = int(reference.timestamps[np.argmax(reference.anomaly)])
        raise CalibrationError(f"reference contains a labeled anomaly at t={bad}")
    # per-column reductions so a window equal to the reference reproduces these bit for bit
    cols = {c: reference.values[:, j] for j, c in enumerate(CHANNELS)}
    return NormalProfile(
        min={c: float(x.min()) for c, x in cols.items()},
        max={c: float(x.max()) for c, x in cols.items()},
        mean={c: float(x.mean()) for c, x in cols.items()},
        std={c: float(np.std(x)) for c, x in cols.items()},
    )


def _values(window) -> np.ndarray:
    return window if isinstance(window, np.ndarray) else window.values


def split_halves(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First half takes the extra row when the length is odd."""
    k = (len(x) + 1) // 2
    return x[:k], x[k:]


def anomaly_violations(window: WindowView | np.ndarray, profile: NormalProfile) -> list[tuple[str, str, float, float]]:
    """(rule, channel, observed, threshold) for every violated rule."""
    values = _values(window)
    out = []
    for j, c in enumerate(CHANNELS):
        x = values[:, j]
        lo, hi = float(x.min()), float(x.max())
        if lo < profile.min[c]:
            out.append(("bound_min", c, lo, profile.min[c]))
        if hi > profile.max[c]:
            out.append(("bound_max", c, hi, profile.max[c]))
        sd = float(np.std(x))
        if sd > profile.std[c]:
            out.append(("variability", c, sd, profile.std[c]))
        first, second = split_halves(x)
        if len(second):
            shift = abs(float(second.mean()) - float(first.mean()))
            if shift > 2 * profile.std[c]:
                out.append(("trend_shift", c, shift, 2 * profile.std[c]))
    return out


def detect_anomaly(window: WindowView | np.ndarray, profile: NormalProfile) -> Detection:
    violations = anomaly_violations(window, profile)
    if not violations:
        return Detection(False, explanation="no rule violated")
    lines = [f"rule={r} channel={c} observed={obs:.6g} threshold={thr:.6g}" for r, c, obs, thr in violations]
    return Detection(True, explanation="\n".join(lines))


def recent_means(window: WindowView | np.ndarray, span: int = FAULT_SPAN) -> dict[str, float]:
    values = _values(window)
    tail = values[-span:]
    return {c: float(tail[:, j].mean()) for j, c in enumerate(CHANNELS)}


def classify_fault(window: WindowView | np.ndarray, profile: NormalProfile, span: int = FAULT_SPAN) -> FaultCall:
    means = recent_means(window, span)
    verdicts = {}
    lines = []
    for fault, conjuncts in FAULT_RULES.items():
        ok = True
        for c, direction in conjuncts:
            mu, sd = profile.mean[c], profile.std[c]
            if direction == "low":
                thr, hit = mu - sd, means[c] < mu - sd
                op = "<"
            else:
                thr, hit = mu + sd, means[c] > mu + sd
                op = ">"
            ok = ok and hit
            status = "satisfied" if hit else "violated"
            lines.append(f"fault={fault} channel={c} test=mean{op}{thr:.6g} observed={means[c]:.6g} {status}")
        verdicts[fault] = ok
    return FaultCall(verdicts["leak"], verdicts["compressor"], verdicts["filter"], explanation="\n".join(lines))
