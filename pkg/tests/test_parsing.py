import pytest

from hvac_phm.agents.parsing import UnparseableReply, parse_anomaly_reply, parse_fault_reply
from hvac_phm.faults import FaultType

L, C, F = FaultType.LEAK, FaultType.COMPRESSOR, FaultType.FILTER


@pytest.mark.parametrize(
    "reply, expected",
    [
        ("Key observation: P_suct fell.\nPredicted anomaly: True\nExplanation: leak signature.", True),
        ("Predicted anomaly: False", False),
        ("No anomaly is present in the latest hour.", False),
        ("- Anomaly present (yes/no): **Yes**", True),
        ("Whether an anomaly is present: no", False),
        ("Yes, the last hour looks anomalous because power jumped.", True),
        ("Verdict: true", True),
    ],
)
def test_anomaly_verdicts(reply, expected):
    assert parse_anomaly_reply(reply).anomalous is expected


def test_anomaly_sections_extracted():
    reply = "Key observations: Q_air dropped to 600.\nPredicted anomaly: True\nExplanation: airflow restriction."
    det = parse_anomaly_reply(reply)
    assert det.key_observations == "Q_air dropped to 600."
    assert det.explanation == "airflow restriction."
    assert det.raw_reply == reply


def test_whole_reply_as_explanation_without_heading():
    det = parse_anomaly_reply("yes, an anomaly in suction pressure")
    assert det.explanation == "yes, an anomaly in suction pressure"


@pytest.mark.parametrize("reply", ["", "The data shows a daily cycle.", "Maybe. Hard to say."])
def test_anomaly_unparseable(reply):
    with pytest.raises(UnparseableReply):
        parse_anomaly_reply(reply)


def test_fault_reply_centralized():
    call = parse_fault_reply("Refrigerant leak: true, Compressor failure: false, Blocked filter: false")
    assert call.flags() == (True, False, False)


def test_fault_reply_order_and_case_insensitive():
    reply = "BLOCKED FILTER - yes\nrefrigerant leak: no\ncompressor failure: present"
    assert parse_fault_reply(reply).flags() == (False, True, True)


def test_fault_reply_verdict_before_name():
    assert parse_fault_reply("False - refrigerant leak", (L,)).flags() == (False, False, False)


def test_fault_reply_bare_single_verdict():
    assert parse_fault_reply("true", (F,)).flags() == (False, False, True)


def test_fault_reply_not_present():
    call = parse_fault_reply("Refrigerant leak: not present. Compressor failure: absent. Blocked filter: true.")
    assert call.flags() == (False, False, True)


def test_unasked_faults_are_false():
    call = parse_fault_reply("Compressor failure: true\nBlocked filter: true", (C,))
    assert call.flags() == (False, True, False)


def test_missing_verdict_centralized():
    with pytest.raises(UnparseableReply):
        parse_fault_reply("Refrigerant leak: true, Compressor failure: false")


def test_echoed_instruction_is_ignored():
    reply = "Refrigerant leak (true/false): false\nCompressor failure (true/false): true\nBlocked filter (true/false): false"
    assert parse_fault_reply(reply).flags() == (False, True, False)
