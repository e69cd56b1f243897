"""Fault injection: severity x onset profile, per-fault sensor effects, drift, labels."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .sim import CHANNEL_FIELDS, CHANNELS, ConfigError, NominalState


class FaultType(str, enum.Enum):
    LEAK = "refrigerant_leak"
    COMPRESSOR = "compressor_fault"
    FILTER = "filter_blockage"

    @classmethod
    def parse(cls, name: str) -> "FaultType":
        key = str(name).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {
            "leak": cls.LEAK,
            "refrigerantleak": cls.LEAK,
            "comp": cls.COMPRESSOR,
            "compressor": cls.COMPRESSOR,
            "compressorfault": cls.COMPRESSOR,
            "compressor_failure": cls.COMPRESSOR,
            "filter": cls.FILTER,
            "filterblockage": cls.FILTER,
            "blocked_filter": cls.FILTER,
        }
        if key in aliases:
            return aliases[key]
        return cls(key)


FAULT_ORDER = (FaultType.LEAK, FaultType.COMPRESSOR, FaultType.FILTER)

# Channels that cannot physically go negative (pressures, power, flows).
_NONNEGATIVE = ("q_cool", "p_comp", "p_suct", "p_disc", "q_air")


class OnsetKind(str, enum.Enum):
    STEP = "step"
    LINEAR_RAMP = "ramp"
    EXPONENTIAL = "exponential"

    @classmethod
    def parse(cls, name: str) -> "OnsetKind":
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"linear_ramp": cls.LINEAR_RAMP, "linear": cls.LINEAR_RAMP, "exp": cls.EXPONENTIAL}
        return aliases.get(key) or cls(key)


@dataclass(frozen=True)
class OnsetProfile:
    kind: OnsetKind
    t0: float
    t1: float | None = None
    tau: float | None = None

    def __post_init__(self):
        if self.kind is OnsetKind.LINEAR_RAMP and (self.t1 is None or not self.t1 > self.t0):
            raise ConfigError("t1", "linear ramp needs t1 > t0")
        if self.kind is OnsetKind.EXPONENTIAL and (self.tau is None or not self.tau > 0):
            raise ConfigError("tau", "exponential onset needs tau > 0")

    def shape(self, t: float) -> float:
        """Unscaled onset f(t) for t >= t0."""
        if self.kind is OnsetKind.STEP:
            return 1.0
        if self.kind is OnsetKind.LINEAR_RAMP:
            return min(1.0, (t - self.t0) / (self.t1 - self.t0))
        return 1.0 - math.exp(-(t - self.t0) / self.tau)


@dataclass(frozen=True)
class FaultSpec:
    fault_type: FaultType
    severity: float
    onset: OnsetProfile
    end: float

    def __post_init__(self):
        if not 0.0 <= self.severity <= 1.0:
            raise ConfigError("severity", f"must lie in [0, 1], got {self.severity}")
        if not self.end > self.onset.t0:
            raise ConfigError("end", "must be after the onset time t0")

    @classmethod
    def from_mapping(cls, data: dict) -> "FaultSpec":
        allowed = {"type", "severity", "profile", "t0", "t1", "tau", "end"}
        for key in data:
            if key not in allowed:
                raise ConfigError(f"fault.{key}", "unknown fault key")
        for key in ("type", "severity", "profile", "t0", "end"):
            if key not in data:
                raise ConfigError(f"fault.{key}", "missing")
        try:
            fault_type = FaultType.parse(data["type"])
        except ValueError:
            raise ConfigError("fault.type", f"unknown fault type {data['type']!r}") from None
        try:
            kind = OnsetKind.parse(data["profile"])
        except ValueError:
            raise ConfigError("fault.profile", f"unknown onset profile {data['profile']!r}") from None
        onset = OnsetProfile(kind, float(data["t0"]), _opt_float(data.get("t1")), _opt_float(data.get("tau")))
        return cls(fault_type, float(data["severity"]), onset, float(data["end"]))

    def to_mapping(self) -> dict:
        out = {
            "type": self.fault_type.value,
            "severity": self.severity,
            "profile": self.onset.kind.value,
            "t0": self.onset.t0,
            "end": self.end,
        }
        if self.onset.t1 is not None:
            out["t1"] = self.onset.t1
        if self.onset.tau is not None:
            out["tau"] = self.onset.tau
        return out


@dataclass(frozen=True)
class DriftSpec:
    channel: str
    rate: float
    start: float = 0.0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ConfigError("drift.channel", f"unknown channel {self.channel!r}")
        if not math.isfinite(self.rate):
            raise ConfigError("drift.rate", "must be finite")

    @classmethod
    def from_mapping(cls, data: dict) -> "DriftSpec":
        for key in data:
            if key not in ("channel", "rate", "start"):
                raise ConfigError(f"drift.{key}", "unknown drift key")
        if "channel" not in data or "rate" not in data:
            raise ConfigError("drift", "needs channel and rate")
        return cls(str(data["channel"]), float(data["rate"]), float(data.get("start", 0.0)))

    def to_mapping(self) -> dict:
        return {"channel": self.channel, "rate": self.rate, "start": self.start}


def _opt_float(x):
    return None if x is None else float(x)


@dataclass(frozen=True)
class FaultImpacts:
    leak: float = 0.0
    comp: float = 0.0
    filter: float = 0.0


@dataclass(frozen=True)
class GroundTruth:
    anomaly: bool = False
    leak_active: bool = False
    comp_active: bool = False
    filter_active: bool = False

    def flags(self) -> tuple[bool, bool, bool]:
        return (self.leak_active, self.comp_active, self.filter_active)


def fault_impact(spec: FaultSpec, t: float) -> float:
    if t < spec.onset.t0 or t >= spec.end:
        return 0.0
    return spec.severity * spec.onset.shape(t)


def impacts_at(specs, t: float) -> FaultImpacts:
    """Sum per-type impacts of all specs at ``t`` (overlapping same-type faults add, capped at 1)."""
    totals = {ft: 0.0 for ft in FAULT_ORDER}
    for spec in specs:
        totals[spec.fault_type] += fault_impact(spec, t)
    return FaultImpacts(
        leak=min(1.0, totals[FaultType.LEAK]),
        comp=min(1.0, totals[FaultType.COMPRESSOR]),
        filter=min(1.0, totals[FaultType.FILTER]),
    )


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def apply_faults(nominal: NominalState, impacts: FaultImpacts) -> NominalState:
    """Apply leak, then compressor, then filter effects to the nominal readings."""
    v = {name: getattr(nominal, name) for name in CHANNEL_FIELDS.values()}

    f = _clamp01(impacts.leak)
    v["q_cool"] *= 1 - 0.5 * f
    v["p_suct"] *= 1 - 0.3 * f
    v["p_comp"] *= 1 + 0.2 * f
    v["t_supply"] += 3.0 * f

    f = _clamp01(impacts.comp)
    v["p_comp"] *= 1 - 0.7 * f
    v["q_cool"] *= 1 - 0.9 * f
    v["p_suct"] *= 1 + 0.2 * f
    v["p_disc"] *= 1 - 0.5 * f

    f = _clamp01(impacts.filter)
    v["q_air"] *= 1 - 0.4 * f
    v["t_return"] += 2.0 * f
    v["p_comp"] *= 1 + 0.15 * f

    for name in _NONNEGATIVE:
        v[name] = max(0.0, v[name])
    return replace(nominal, **v)


def apply_drift(value: float, spec: DriftSpec, t: float, channel: str | None = None) -> float:
    """Additive linear drift; ``channel`` defaults to the drift's own channel."""
    if channel is not None and channel != spec.channel:
        return value
    return value + spec.rate * max(0.0, t - spec.start)


def label(impacts: FaultImpacts, threshold: float = 0.01) -> GroundTruth:
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    leak = impacts.leak > threshold
    comp = impacts.comp > threshold
    filt = impacts.filter > threshold
    return GroundTruth(leak or comp or filt, leak, comp, filt)
