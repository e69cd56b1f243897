"""Lenient extraction of verdicts from free-text model replies."""

from __future__ import annotations

import re

from ..faults import FaultType
from ..verdicts import Detection, FaultCall


class UnparseableReply(ValueError):
    pass


_POSITIVE = {"yes", "true", "present", "detected"}

# An explicitly labeled verdict: "anomaly is present: yes", "Predicted anomaly: True", ...
_LABELED = re.compile(
    r"(?:anomaly\s+(?:is\s+)?present|predicted\s+anomaly|anomaly\s+detected|anomaly)"
    r"\s*(?:\(yes/no\))?\s*[:=\-]\s*[*_`\"']*\s*(yes|no|true|false)\b",
    re.IGNORECASE,
)
_YES_NO = re.compile(r"\b(yes|no)\b", re.IGNORECASE)
_TRUE_FALSE = re.compile(r"\b(true|false)\b", re.IGNORECASE)
_ANOMALY = re.compile(r"anomal", re.IGNORECASE)
_NEAR = 40

_HEADINGS = {
    "key_observations": re.compile(r"key\s+observations?", re.IGNORECASE),
    "explanation": re.compile(r"explanation", re.IGNORECASE),
}
_ANY_HEADING = re.compile(
    r"^[\s#>*_-]*(key\s+observations?|explanation|predicted\s+anomaly|ground\s+truth|"
    r"anomaly\s+(?:is\s+)?present|conclusion)[*_\s]*:",
    re.IGNORECASE | re.MULTILINE,
)


def _strip_echo(text: str) -> str:
    # replies sometimes echo the "(yes/no)" / "(true/false)" instruction
    return re.sub(r"\((?:yes/no|true/false)\)", " ", text, flags=re.IGNORECASE)


def _anomaly_verdict(text: str) -> bool:
    m = _LABELED.search(text)
    if m:
        return m.group(1).lower() in _POSITIVE
    for m in _YES_NO.finditer(text):
        lo, hi = max(0, m.start() - _NEAR), m.end() + _NEAR
        if _ANOMALY.search(text, lo, hi):
            return m.group(1).lower() == "yes"
    m = _TRUE_FALSE.search(text)
    if m:
        return m.group(1).lower() == "true"
    raise UnparseableReply("no anomaly verdict found in reply")


def _sections(text: str) -> dict[str, str]:
    marks = [(m.start(), m.end(), m.group(1)) for m in _ANY_HEADING.finditer(text)]
    out = {}
    for i, (_, end, name) in enumerate(marks):
        stop = marks[i + 1][0] if i + 1 < len(marks) else len(text)
        for key, pat in _HEADINGS.items():
            if pat.fullmatch(name.strip()):
                out[key] = text[end:stop].strip().strip("*_ ").strip()
    return out


def parse_anomaly_reply(reply_text: str) -> Detection:
    text = _strip_echo(reply_text)
    anomalous = _anomaly_verdict(text)
    sections = _sections(reply_text)
    explanation = sections.get("explanation") or reply_text.strip()
    return Detection(
        anomalous=anomalous,
        explanation=explanation,
        key_observations=sections.get("key_observations", ""),
        raw_reply=reply_text,
    )


FAULT_ALIASES = {
    FaultType.LEAK: ("refrigerant leak", "refrigerant leakage", "leak"),
    FaultType.COMPRESSOR: ("compressor failure", "compressor fault", "compressor"),
    FaultType.FILTER: ("blocked filter", "filter blockage", "filter"),
}

_VERDICT = r"(true|false|yes|no|not\s+present|absent|present)"


def _fault_verdict(text: str, fault: FaultType) -> bool | None:
    for alias in FAULT_ALIASES[fault]:
        name = alias.replace(" ", r"\s+")
        after = re.search(rf"{name}[^\n.;,]*?\b{_VERDICT}\b", text, re.IGNORECASE)
        if after:
            return after.group(1).lower() in _POSITIVE
        before = re.search(rf"\b{_VERDICT}\b\W{{0,5}}{name}", text, re.IGNORECASE)
        if before:
            return before.group(1).lower() in _POSITIVE
    return None


def parse_fault_reply(reply_text: str, expected=tuple(FAULT_ALIASES)) -> FaultCall:
    """Verdicts for the faults the prompt asked about; others are false."""
    text = _strip_echo(reply_text)
    expected = tuple(expected)
    verdicts = {}
    for fault in expected:
        v = _fault_verdict(text, fault)
        if v is None and len(expected) == 1:
            # a single-fault agent may answer with a bare true/false
            m = re.search(rf"\b{_VERDICT}\b", text, re.IGNORECASE)
            v = None if m is None else m.group(1).lower() in _POSITIVE
        if v is None:
            raise UnparseableReply(f"no verdict for {fault.value} in reply")
        verdicts[fault] = v
    explanation = _sections(reply_text).get("explanation") or reply_text.strip()
    return FaultCall(
        leak=verdicts.get(FaultType.LEAK, False),
        compressor=verdicts.get(FaultType.COMPRESSOR, False),
        filter=verdicts.get(FaultType.FILTER, False),
        explanation=explanation,
        raw_reply=reply_text,
    )
