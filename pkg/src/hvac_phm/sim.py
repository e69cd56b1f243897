"""Discrete-time HVAC plant model (hourly steps).

Indoor temperature follows a first-order thermal balance against a sinusoidal
ambient cycle; suction/discharge pressures scale with the cooling fraction and
the compressor draws nominal power (plus noise) only while cooling is active.

Randomness comes from a single ``numpy.random.Generator`` consumed in a fixed
order per hour: ambient noise first, then compressor-power noise.  Both draws
happen every hour regardless of the thermostat state so the stream stays
aligned across scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np


# Sensor channel names in export/render order, and the NominalState field for each.
CHANNELS = ("T_amb", "T_in", "P_comp", "Q_cool", "P_suct", "P_disc", "T_supply", "T_return", "Q_air")
CHANNEL_FIELDS = {
    "T_amb": "t_amb",
    "T_in": "t_in",
    "P_comp": "p_comp",
    "Q_cool": "q_cool",
    "P_suct": "p_suct",
    "P_disc": "p_disc",
    "T_supply": "t_supply",
    "T_return": "t_return",
    "Q_air": "q_air",
}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class SimConfig:
    # ambient
    t_mean: float = 25.0
    amplitude: float = 6.0
    phase: float = 8.0
    ambient_noise_std: float = 0.5
    # thermal
    alpha: float = 0.1
    beta: float = 0.2
    q_nom: float = 10.0
    # compressor power, kW
    p_nom: float = 4.0
    power_noise_std: float = 0.1
    # refrigerant pressure
    p0: float = 2.0
    gamma1: float = 1.5
    gamma2: float = 8.0
    # control
    t_target: float = 22.0
    deadband: float = 0.5
    t_in_initial: float = 24.0
    # air side
    airflow_nominal: float = 1000.0
    airflow_idle: float = 200.0
    supply_delta: float = 10.0
    return_delta: float = 2.0
    duration_hours: int = 240
    seed: int = 42

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f.name, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f.name, "must be finite")
        if not 0 < self.alpha <= 1:
            raise ConfigError("alpha", "must lie in (0, 1]")
        if self.beta < 0:
            raise ConfigError("beta", "must be >= 0")
        if self.q_nom <= 0:
            raise ConfigError("q_nom", "must be > 0")
        if self.p_nom <= 0:
            raise ConfigError("p_nom", "must be > 0")
        if self.ambient_noise_std < 0:
            raise ConfigError("ambient_noise_std", "must be >= 0")
        if self.power_noise_std < 0:
            raise ConfigError("power_noise_std", "must be >= 0")
        if self.deadband < 0:
            raise ConfigError("deadband", "must be >= 0")
        if self.airflow_idle < 0:
            raise ConfigError("airflow_idle", "must be >= 0")
        if not self.airflow_nominal > self.airflow_idle:
            raise ConfigError("airflow_nominal", "must exceed airflow_idle")
        if int(self.duration_hours) != self.duration_hours or self.duration_hours < 1:
            raise ConfigError("duration_hours", "must be an integer >= 1")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed", "must be a non-negative integer")

    @classmethod
    def from_mapping(cls, data: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(str(key), "unknown configuration key")
        return cls(**data)


@dataclass(frozen=True)
class NominalState:
    t: int
    t_amb: float
    t_in: float
    q_cool: float
    p_comp: float
    p_suct: float
    p_disc: float
    t_supply: float
    t_return: float
    q_air: float
    cooling_active: bool

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, CHANNEL_FIELDS[c]) for c in CHANNELS)


def make_rng(cfg: SimConfig) -> np.random.Generator:
    return np.random.default_rng(int(cfg.seed))


def ambient_temperature(cfg: SimConfig, t: float, rng: np.random.Generator) -> float:
    """Daily sinusoid around ``t_mean`` plus Gaussian noise (one draw)."""
    noise = rng.normal(0.0, cfg.ambient_noise_std)
    return cfg.t_mean + cfg.amplitude * math.sin(2 * math.pi * (t - cfg.phase) / 24) + noise


def thermostat(cfg: SimConfig, t_in: float, previously_active: bool) -> bool:
    if t_in > cfg.t_target + cfg.deadband:
        return True
    if t_in < cfg.t_target - cfg.deadband:
        return False
    return previously_active


def next_indoor_temperature(cfg: SimConfig, t_in: float, t_amb: float, q_cool: float) -> float:
    return t_in + cfg.alpha * (t_amb - t_in) - cfg.beta * q_cool


def nominal_state(
    cfg: SimConfig, t: int, t_in: float, previously_active: bool, rng: np.random.Generator
) -> NominalState:
    """Pre-fault readings at hour ``t`` given the indoor temperature entering that hour."""
    t_amb = ambient_temperature(cfg, t, rng)
    eta = rng.normal(0.0, cfg.power_noise_std)
    active = thermostat(cfg, t_in, previously_active)
    q_cool = cfg.q_nom if active else 0.0
    frac = q_cool / cfg.q_nom
    return NominalState(
        t=t,
        t_amb=t_amb,
        t_in=t_in,
        q_cool=q_cool,
        p_comp=cfg.p_nom + eta if active else 0.0,
        p_suct=cfg.p0 + cfg.gamma1 * frac,
        p_disc=cfg.p0 + cfg.gamma2 * frac,
        t_supply=t_in - cfg.supply_delta * frac,
        t_return=t_in + cfg.return_delta,
        q_air=cfg.airflow_nominal if active else cfg.airflow_idle,
        cooling_active=active,
    )


def initial_state(cfg: SimConfig, rng: np.random.Generator) -> NominalState:
    return nominal_state(cfg, 0, cfg.t_in_initial, False, rng)


def step_nominal(
    cfg: SimConfig,
    prev: NominalState,
    rng: np.random.Generator,
    q_cool_effective: float | None = None,
) -> NominalState:
    """Advance one hour.

    ``q_cool_effective`` is the post-fault cooling delivered during ``prev.t``;
    it defaults to the nominal output when no fault layer is in play.
    """
    q_eff = prev.q_cool if q_cool_effective is None else q_cool_effective
    t_in = next_indoor_temperature(cfg, prev.t_in, prev.t_amb, q_eff)
    return nominal_state(cfg, prev.t + 1, t_in, prev.cooling_active, rng)
