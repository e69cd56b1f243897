"""Prompt templates for the anomaly-detection and fault-classification agents.

Blocks excluded by the representation are dropped together with their
headers.  Decentralized fault prompts keep only the pattern line of the one
fault they ask about.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..dataset import Reference, Representation, WindowStats, WindowView, compute_stats, render
from ..faults import FaultType

ANOMALY_SYSTEM = """\
You are an expert HVAC monitoring system. Your job is to analyze sensor data from HVAC systems to detect potential anomalies.

When analyzing sensor data:
- Look for unusual patterns or trends in the data
- Consider relationships between different sensors

Common anomaly patterns:
- Sudden spikes or drops in readings
- Unusual patterns in sensor relationships
- Values outside normal operating ranges
- Inconsistent behavior between related sensors"""

ANOMALY_TASK = (
    "Analyze the following HVAC sensor data to determine if the latest hour of data is anomalous "
    "with respect to the previous hours of data."
)

ANOMALY_QUESTION = """\
Is there evidence of any anomalies? Provide your analysis, including:
- Concise, key observations from the sensor data
- Whether you believe an anomaly is present (yes/no)
- If an anomaly is present, provide a concise explanation for your conclusion"""

FAULT_ROLE = (
    "You are an expert HVAC fault classification system. Your job is to analyze sensor data and "
    "classify the type of fault present in the system."
)

ANALYSIS_GUIDANCE = """\
When analyzing sensor data:
- Look for unusual patterns or trends in the data
- Consider relationships between different sensors"""

FAULT_NAMES = {
    FaultType.LEAK: "Refrigerant leak",
    FaultType.COMPRESSOR: "Compressor failure",
    FaultType.FILTER: "Blocked filter",
}

FAULT_PATTERNS = {
    FaultType.LEAK: "Reduced suction pressure, reduced cooling output, increased compressor power and increased supply air temperature",
    FaultType.COMPRESSOR: "Reduced compressor power, reduced cooling output, increased suction pressure and decreased discharge pressure",
    FaultType.FILTER: "Reduced airflow rate, increased return air temperature and increased compressor power",
}

FAULT_TASK = (
    "Analyze the following HVAC sensor data to classify the most probable type of faults present "
    "in the last hour of data with respect to the previous hours of data."
)

FAULT_QUESTION_ALL = "Classify the type of fault present. For each fault type, indicate whether it is present (true/false):"
FAULT_QUESTION_ONE = "Classify whether the following fault is present (true/false):"
FAULT_CLOSING = "Provide a concise, brief explanation for your classification"

FEEDBACK_HEADER = "Labeled examples from previous evaluations (model prediction and expert-corrected label):"

ALL_FAULTS = (FaultType.LEAK, FaultType.COMPRESSOR, FaultType.FILTER)


@dataclass(frozen=True)
class Prompt:
    system_text: str
    user_text: str


def _data_sections(blocks, include_reference: bool) -> list[str]:
    sections = []
    if blocks.sensor_data:
        sections.append("Sensor data:\n" + blocks.sensor_data)
    if blocks.statistics:
        sections.append("Statistics:\n" + blocks.statistics)
    if include_reference:
        if blocks.reference_data:
            sections.append("Reference sensor data:\n" + blocks.reference_data)
        if blocks.reference_statistics:
            sections.append("Reference sensor statistics:\n" + blocks.reference_statistics)
    return sections


def build_anomaly_prompt(
    window: WindowView,
    stats: WindowStats | None,
    representation: Representation,
    reference: Reference | None = None,
    feedback: str = "",
) -> Prompt:
    """``feedback`` (continual-learning memory) is inserted before the question when non-empty."""
    stats = compute_stats(window) if stats is None else stats
    blocks = render(window, stats, representation, reference)
    parts = [ANOMALY_TASK, "\n".join(_data_sections(blocks, include_reference=True))]
    if feedback:
        parts.append(FEEDBACK_HEADER + "\n" + feedback)
    parts.append(ANOMALY_QUESTION)
    return Prompt(ANOMALY_SYSTEM, "\n\n".join(parts))


def build_fault_prompt(
    window: WindowView,
    stats: WindowStats | None,
    representation: Representation,
    fault: FaultType | None = None,
) -> Prompt:
    """Centralized prompt when ``fault`` is None; otherwise specialized to that single fault."""
    stats = compute_stats(window) if stats is None else stats
    # reference blocks belong to the anomaly stage only
    data_only = Representation(representation.mode)
    blocks = render(window, stats, data_only)
    faults = ALL_FAULTS if fault is None else (fault,)
    patterns = "\n".join(f"- {FAULT_NAMES[f]}: {FAULT_PATTERNS[f]}" for f in faults)
    system = f"{FAULT_ROLE}\n\n{ANALYSIS_GUIDANCE}\n\nCommon fault patterns:\n{patterns}"
    question = FAULT_QUESTION_ALL if fault is None else FAULT_QUESTION_ONE
    listing = "\n".join(f"- {FAULT_NAMES[f]}" for f in faults)
    user = "\n\n".join(
        [FAULT_TASK, "\n".join(_data_sections(blocks, include_reference=False)), f"{question}\n{listing}\n{FAULT_CLOSING}"]
    )
    return Prompt(system, user)
