"""Scenario bundles (plant config + fault/drift schedule) and their YAML form.

The fault schedules here are representative, not copies of any published
dataset: three overlapping faults over ten days for the detection study, and
a recurring filter blockage over twenty days for the continual-learning loop.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .faults import DriftSpec, FaultSpec, FaultType, OnsetKind, OnsetProfile
from .sim import ConfigError, SimConfig

DEFAULT_LABEL_THRESHOLD = 0.01


@dataclass(frozen=True)
class Scenario:
    config: SimConfig = field(default_factory=SimConfig)
    faults: tuple[FaultSpec, ...] = ()
    drifts: tuple[DriftSpec, ...] = ()
    label_threshold: float = DEFAULT_LABEL_THRESHOLD

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, config=replace(self.config, seed=seed))

    def to_mapping(self) -> dict:
        out = asdict(self.config)
        out["label_threshold"] = self.label_threshold
        if self.faults:
            out["faults"] = [f.to_mapping() for f in self.faults]
        if self.drifts:
            out["drifts"] = [d.to_mapping() for d in self.drifts]
        return out

    @classmethod
    def from_mapping(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "scenario file must be a key-value mapping")
        data = dict(data)
        faults = data.pop("faults", None) or []
        drifts = data.pop("drifts", None) or []
        threshold = data.pop("label_threshold", DEFAULT_LABEL_THRESHOLD)
        if not isinstance(faults, list):
            raise ConfigError("faults", "must be a list of fault blocks")
        if not isinstance(drifts, list):
            raise ConfigError("drifts", "must be a list of drift blocks")
        try:
            threshold = float(threshold)
        except (TypeError, ValueError):
            raise ConfigError("label_threshold", "must be a number") from None
        if threshold < 0:
            raise ConfigError("label_threshold", "must be >= 0")
        return cls(
            config=SimConfig.from_mapping(data),
            faults=tuple(FaultSpec.from_mapping(f) for f in faults),
            drifts=tuple(DriftSpec.from_mapping(d) for d in drifts),
            label_threshold=threshold,
        )


def load_scenario(path) -> Scenario:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from None
    return Scenario.from_mapping(data or {})


def dump_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario.to_mapping(), sort_keys=False))


def _fault(kind, severity, profile, t0, end, t1=None, tau=None) -> FaultSpec:
    return FaultSpec(kind, severity, OnsetProfile(profile, t0, t1, tau), end)


def default_scenario(seed: int = 42) -> Scenario:
    """Ten days, three overlapping faults with step / ramp / exponential onsets."""
    faults = (
        _fault(FaultType.LEAK, 0.8, OnsetKind.STEP, 72, 150),
        _fault(FaultType.COMPRESSOR, 0.9, OnsetKind.LINEAR_RAMP, 120, 200, t1=132),
        _fault(FaultType.FILTER, 1.0, OnsetKind.EXPONENTIAL, 170, 235, tau=6),
    )
    return Scenario(SimConfig(duration_hours=240, seed=seed), faults)


def step_scenario(severity: float = 0.8, seed: int = 42) -> Scenario:
    """Same schedule as :func:`default_scenario` with every onset a step."""
    base = default_scenario(seed)
    faults = tuple(
        replace(f, severity=severity, onset=OnsetProfile(OnsetKind.STEP, f.onset.t0)) for f in base.faults
    )
    return replace(base, faults=faults)


def continual_scenario(seed: int = 7, days: int = 20) -> Scenario:
    """Recurring filter blockage: daily events early on, a long quiet gap, one late event.

    Each event lasts at most one day, with a linear-ramp onset and a randomized
    severity/start/length drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    event_days = [1, 2, 3, days - 2]
    faults = []
    for day in event_days:
        start = day * 24 + int(rng.integers(2, 8))
        length = int(rng.integers(8, 17))
        ramp = int(rng.integers(2, 6))
        severity = round(float(rng.uniform(0.6, 1.0)), 3)
        faults.append(_fault(FaultType.FILTER, severity, OnsetKind.LINEAR_RAMP, start, start + length, t1=start + ramp))
    return Scenario(SimConfig(duration_hours=days * 24, seed=seed), tuple(faults))
