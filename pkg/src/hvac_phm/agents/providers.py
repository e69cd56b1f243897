"""Completion providers: HTTP chat endpoint, ground-truth oracle, transcript replay.

A provider turns a :class:`CompletionRequest` into reply text or raises
:class:`TransportError`.  ``request.meta`` carries the evaluated hour and
stage for offline mocks; it is never sent over the wire.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Protocol

import httpx

from ..dataset import TimeSeries
from ..faults import FaultType
from .prompts import FAULT_NAMES

TOKEN_ENV = "PHM_PROVIDER_TOKEN"
URL_ENV = "PHM_PROVIDER_URL"
DEFAULT_URL = "https://api.openai.com/v1/chat/completions"


class TransportError(RuntimeError):
    pass


class ProviderConfigError(RuntimeError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    system_text: str
    user_text: str
    model_name: str
    meta: Mapping = field(default_factory=dict, compare=False)

    def key(self) -> str:
        h = hashlib.sha256()
        for part in (self.model_name, self.system_text, self.user_text):
            h.update(part.encode())
            h.update(b"\x00")
        return h.hexdigest()


class CompletionProvider(Protocol):
    def complete(self, request: CompletionRequest) -> str: ...


def wire_payload(request: CompletionRequest) -> dict:
    # inference hyperparameters deliberately left at provider defaults
    return {
        "model": request.model_name,
        "messages": [
            {"role": "system", "content": request.system_text},
            {"role": "user", "content": request.user_text},
        ],
    }


class HTTPProvider:
    def __init__(self, url: str, token: str, timeout: float = 60.0, client: httpx.Client | None = None):
        self.url = url
        self.token = token
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    @classmethod
    def from_env(cls, timeout: float = 60.0, env: Mapping | None = None) -> "HTTPProvider":
        env = os.environ if env is None else env
        token = (env.get(TOKEN_ENV) or "").strip()
        if not token:
            raise ProviderConfigError(f"missing auth token: set {TOKEN_ENV} or use --mock")
        url = (env.get(URL_ENV) or "").strip() or DEFAULT_URL
        return cls(url, token, timeout)

    def complete(self, request: CompletionRequest) -> str:
        try:
            resp = self._client.post(
                self.url,
                json=wire_payload(request),
                headers={"Authorization": f"Bearer {self.token}"},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed response body: {exc}") from exc


class FunctionProvider:
    """Wraps a plain callable; handy for scripted mocks."""

    def __init__(self, fn: Callable[[CompletionRequest], str]):
        self.fn = fn

    def complete(self, request: CompletionRequest) -> str:
        return self.fn(request)


def oracle_anomaly_reply(anomalous: bool) -> str:
    verdict = "True" if anomalous else "False"
    explanation = (
        "Ground-truth oracle: the latest hour is labeled as faulty."
        if anomalous
        else "Ground-truth oracle: the latest hour is labeled as normal operation."
    )
    return f"Key observation: oracle reply.\nPredicted anomaly: {verdict}\nExplanation: {explanation}"


def oracle_fault_reply(flags: Mapping[FaultType, bool]) -> str:
    lines = [f"{FAULT_NAMES[f]}: {'true' if v else 'false'}" for f, v in flags.items()]
    return "\n".join(lines) + "\nExplanation: ground-truth oracle."


class OracleProvider:
    """Answers from the series' labels at ``meta['t']`` (offline plumbing checks)."""

    def __init__(self, series: TimeSeries):
        self.series = series
        self._pos = {int(t): i for i, t in enumerate(series.timestamps)}

    def complete(self, request: CompletionRequest) -> str:
        meta = request.meta
        if "t" not in meta:
            raise TransportError("oracle provider needs the evaluated hour in request.meta")
        truth = self.series.truth(self._pos[int(meta["t"])])
        if meta.get("stage") == "fault":
            truth_map = {FaultType.LEAK: truth.leak_active, FaultType.COMPRESSOR: truth.comp_active, FaultType.FILTER: truth.filter_active}
            asked = [FaultType(f) for f in meta.get("faults", [f.value for f in truth_map])]
            return oracle_fault_reply({f: truth_map[f] for f in asked})
        return oracle_anomaly_reply(truth.anomaly)


class TranscriptProvider:
    """Replays replies recorded in a JSON-lines transcript, keyed by prompt hash."""

    def __init__(self, path):
        self.path = Path(path)
        self._replies = {}
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    self._replies[rec["key"]] = rec["reply"]
                except (ValueError, KeyError) as exc:
                    raise ProviderConfigError(f"{self.path}:{lineno}: bad transcript record ({exc})") from None

    def complete(self, request: CompletionRequest) -> str:
        try:
            return self._replies[request.key()]
        except KeyError:
            raise TransportError("prompt not found in transcript") from None

