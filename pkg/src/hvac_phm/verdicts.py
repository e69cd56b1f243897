"""Detector outputs shared by the rule baseline and the model agents."""

from __future__ import annotations

from dataclasses import dataclass, field

from .faults import FaultType


@dataclass(frozen=True)
class Detection:
    anomalous: bool
    explanation: str = ""
    key_observations: str = ""
    raw_reply: str = ""


@dataclass(frozen=True)
class FaultCall:
    leak: bool = False
    compressor: bool = False
    filter: bool = False
    explanation: str = ""
    raw_reply: str = ""

    def flags(self) -> tuple[bool, bool, bool]:
        return (self.leak, self.compressor, self.filter)

    def get(self, fault: FaultType) -> bool:
        return {FaultType.LEAK: self.leak, FaultType.COMPRESSOR: self.compressor, FaultType.FILTER: self.filter}[fault]


@dataclass
class WindowResult:
    """Outcome for one evaluation instant.

    ``failed`` marks transport failures: such windows are excluded from the
    confusion counts and reported separately.  ``fault_call`` is None when the
    classification stage did not run.
    """

    t: int
    detection: Detection | None
    fault_call: FaultCall | None = None
    failed: bool = False
    errors: list[str] = field(default_factory=list)
    exchanges: list[dict] = field(default_factory=list)

    @property
    def predicted_anomaly(self) -> bool | None:
        if self.failed or self.detection is None:
            return None
        return self.detection.anomalous

    @property
    def predicted_faults(self) -> tuple[bool, bool, bool] | None:
        if self.failed:
            return None
        return self.fault_call.flags() if self.fault_call is not None else (False, False, False)
