import pytest

from hvac_phm.agents.prompts import (
    ALL_FAULTS,
    ANOMALY_QUESTION,
    FAULT_NAMES,
    FAULT_PATTERNS,
    FAULT_QUESTION_ALL,
    FAULT_QUESTION_ONE,
    FEEDBACK_HEADER,
    build_anomaly_prompt,
    build_fault_prompt,
)
from hvac_phm.dataset import Representation, make_reference, run_scenario, windows
from hvac_phm.faults import FaultType
from hvac_phm.scenarios import default_scenario

HEADERS = ("Sensor data:", "Statistics:", "Reference sensor data:", "Reference sensor statistics:")


@pytest.fixture(scope="module")
def series():
    return run_scenario(default_scenario())


@pytest.fixture(scope="module")
def view(series):
    return windows(series, 36)[100]


@pytest.fixture(scope="module")
def reference(series):
    return make_reference(series, 36)


def _headers(text):
    return {h for h in HEADERS if f"\n{h}\n" in f"\n{text}"}


@pytest.mark.parametrize(
    "mode, ref_mode, expected",
    [
        ("stats", "none", {"Statistics:"}),
        ("raw", "none", {"Sensor data:"}),
        ("both", "none", {"Sensor data:", "Statistics:"}),
        ("stats", "stats", {"Statistics:", "Reference sensor statistics:"}),
        ("raw", "raw", {"Sensor data:", "Reference sensor data:"}),
        ("both", "both", set(HEADERS)),
    ],
)
def test_anomaly_blocks_follow_representation(view, reference, mode, ref_mode, expected):
    ref = reference if ref_mode != "none" else None
    prompt = build_anomaly_prompt(view, None, Representation(mode, ref_mode), ref)
    assert _headers(prompt.user_text) == expected


def test_anomaly_prompt_deterministic(view, reference):
    rep = Representation("both", "both")
    assert build_anomaly_prompt(view, None, rep, reference) == build_anomaly_prompt(view, None, rep, reference)


def test_anomaly_prompt_ends_with_question(view):
    prompt = build_anomaly_prompt(view, None, Representation("stats"))
    assert prompt.user_text.endswith(ANOMALY_QUESTION)
    assert FEEDBACK_HEADER not in prompt.user_text


def test_feedback_precedes_question(view):
    prompt = build_anomaly_prompt(view, None, Representation("stats"), feedback="Example 1 (cycle 0):\nx")
    text = prompt.user_text
    assert text.index("Statistics:") < text.index(FEEDBACK_HEADER) < text.index(ANOMALY_QUESTION)


def test_centralized_fault_prompt(view):
    prompt = build_fault_prompt(view, None, Representation("both"))
    for f in ALL_FAULTS:
        assert FAULT_PATTERNS[f] in prompt.system_text
        assert f"- {FAULT_NAMES[f]}\n" in prompt.user_text
    assert FAULT_QUESTION_ALL in prompt.user_text
    assert _headers(prompt.user_text) == {"Sensor data:", "Statistics:"}


@pytest.mark.parametrize("fault", list(FaultType))
def test_decentralized_prompt_single_fault(view, fault):
    prompt = build_fault_prompt(view, None, Representation("stats"), fault)
    for other in ALL_FAULTS:
        assert (FAULT_PATTERNS[other] in prompt.system_text) is (other is fault)
        assert (f"- {FAULT_NAMES[other]}" in prompt.user_text) is (other is fault)
    assert FAULT_QUESTION_ONE in prompt.user_text and FAULT_QUESTION_ALL not in prompt.user_text


def test_raw_fault_prompt_has_no_statistics(view):
    prompt = build_fault_prompt(view, None, Representation("raw"))
    assert _headers(prompt.user_text) == {"Sensor data:"}


def test_fault_prompt_ignores_reference(view):
    plain = build_fault_prompt(view, None, Representation("stats"))
    with_ref = build_fault_prompt(view, None, Representation("stats", "stats"))
    assert plain == with_ref
