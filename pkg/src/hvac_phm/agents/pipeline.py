"""Two-stage diagnosis: anomaly agent, then fault agent(s) only on positives.

Retry policy: every request is attempted ``1 + max_retries`` times.  A reply
that never parses is scored as a negative prediction and logged; a request
that never gets a reply marks the whole window evaluation-failed.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..dataset import DataMode, Reference, Representation, TimeSeries, WindowView, compute_stats, windows
from ..faults import FaultType
from ..verdicts import Detection, FaultCall, WindowResult
from .parsing import UnparseableReply, parse_anomaly_reply, parse_fault_reply
from .prompts import ALL_FAULTS, Prompt, build_anomaly_prompt, build_fault_prompt
from .providers import CompletionProvider, CompletionRequest, TransportError


class Architecture(str, enum.Enum):
    CENTRALIZED = "centralized"
    DECENTRALIZED = "decentralized"


@dataclass(frozen=True)
class AgentConfig:
    model_name: str = "gpt-4o"
    architecture: Architecture = Architecture.CENTRALIZED
    representation: Representation = field(default_factory=Representation)
    window_size: int = 36
    max_retries: int = 2
    timeout: float = 60.0
    max_in_flight: int = 4

    def __post_init__(self):
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.window_size < 2:
            raise ValueError("window_size must be >= 2")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    @property
    def needs_reference(self) -> bool:
        return self.representation.reference_mode is not DataMode.NONE


def _ask(provider: CompletionProvider, prompt: Prompt, cfg: AgentConfig, meta: dict, parse: Callable, result: WindowResult):
    """Send with retries; returns the parsed value, or None if no reply ever parsed.

    Raises TransportError when the final attempt failed in transport.
    """
    request = CompletionRequest(prompt.system_text, prompt.user_text, cfg.model_name, meta)
    last_exc = None
    for attempt in range(cfg.max_retries + 1):
        try:
            reply = provider.complete(request)
        except TransportError as exc:
            last_exc = exc
            result.errors.append(f"{meta.get('stage')}: attempt {attempt + 1}: transport error: {exc}")
            continue
        result.exchanges.append(
            {"key": request.key(), "meta": dict(meta), "system": prompt.system_text, "user": prompt.user_text, "reply": reply}
        )
        try:
            return parse(reply)
        except UnparseableReply as exc:
            last_exc = exc
            result.errors.append(f"{meta.get('stage')}: attempt {attempt + 1}: unparseable reply: {exc}")
    if isinstance(last_exc, TransportError):
        raise last_exc
    return None


def diagnose(
    window: WindowView,
    cfg: AgentConfig,
    provider: CompletionProvider,
    reference: Reference | None = None,
    feedback: str = "",
    run_faults: bool = True,
) -> WindowResult:
    stats = compute_stats(window)
    result = WindowResult(t=window.t, detection=None)
    try:
        prompt = build_anomaly_prompt(window, stats, cfg.representation, reference if cfg.needs_reference else None, feedback)
        det = _ask(provider, prompt, cfg, {"t": window.t, "stage": "anomaly"}, parse_anomaly_reply, result)
        if det is None:
            det = Detection(False, explanation="unparseable reply scored as negative")
        result.detection = det
        if not (run_faults and det.anomalous):
            return result
        result.fault_call = _classify(window, stats, cfg, provider, result)
    except TransportError:
        result.failed = True
    return result


def _classify(window, stats, cfg: AgentConfig, provider, result: WindowResult) -> FaultCall:
    if cfg.architecture is Architecture.CENTRALIZED:
        prompt = build_fault_prompt(window, stats, cfg.representation)
        meta = {"t": window.t, "stage": "fault", "faults": [f.value for f in ALL_FAULTS]}
        call = _ask(provider, prompt, cfg, meta, lambda r: parse_fault_reply(r, ALL_FAULTS), result)
        return FaultCall(explanation="unparseable reply scored as negative") if call is None else call

    verdicts = {}
    explanations = []
    replies = []
    for fault in ALL_FAULTS:
        prompt = build_fault_prompt(window, stats, cfg.representation, fault)
        meta = {"t": window.t, "stage": "fault", "faults": [fault.value]}
        call = _ask(provider, prompt, cfg, meta, lambda r, f=fault: parse_fault_reply(r, (f,)), result)
        if call is None:
            verdicts[fault] = False
            explanations.append(f"{fault.value}: unparseable reply scored as negative")
            continue
        verdicts[fault] = call.get(fault)
        explanations.append(f"{fault.value}: {call.explanation}")
        replies.append(call.raw_reply)
    return FaultCall(
        leak=verdicts[FaultType.LEAK],
        compressor=verdicts[FaultType.COMPRESSOR],
        filter=verdicts[FaultType.FILTER],
        explanation="\n".join(explanations),
        raw_reply="\n---\n".join(replies),
    )


def run_agent(
    series: TimeSeries,
    cfg: AgentConfig,
    provider: CompletionProvider,
    reference: Reference | None = None,
    stride: int = 1,
    run_faults: bool = True,
    views: Sequence[WindowView] | None = None,
    feedback: str = "",
) -> list[WindowResult]:
    """Diagnose every window; at most ``cfg.max_in_flight`` windows are in progress at once."""
    if cfg.needs_reference and reference is None:
        raise ValueError("reference_mode requires a reference segment")
    views = windows(series, cfg.window_size, stride) if views is None else views

    def one(view):
        return diagnose(view, cfg, provider, reference, feedback, run_faults)

    if cfg.max_in_flight == 1:
        return [one(v) for v in views]
    with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
        return list(pool.map(one, views))
