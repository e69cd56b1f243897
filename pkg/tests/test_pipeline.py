import threading
import time

import pytest

from hvac_phm.agents import AgentConfig, Architecture, FunctionProvider, OracleProvider, TransportError, diagnose, run_agent
from hvac_phm.agents.providers import oracle_anomaly_reply, oracle_fault_reply
from hvac_phm.dataset import Representation, make_reference, run_scenario, windows
from hvac_phm.evaluation import score_results
from hvac_phm.faults import FaultType
from hvac_phm.scenarios import default_scenario


@pytest.fixture(scope="module")
def series():
    return run_scenario(default_scenario())


class CallLog:
    """Oracle wrapper that records (t, stage) of every request."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = []
        self._lock = threading.Lock()

    def complete(self, request):
        with self._lock:
            self.calls.append((request.meta["t"], request.meta["stage"], tuple(request.meta.get("faults", ()))))
        return self.inner.complete(request)


@pytest.mark.parametrize("arch", list(Architecture))
def test_stage_two_only_after_positive(series, arch):
    log = CallLog(OracleProvider(series))
    results = run_agent(series, AgentConfig(architecture=arch, window_size=24), log)
    positives = {r.t for r in results if r.detection.anomalous}
    fault_ts = {t for t, stage, _ in log.calls if stage == "fault"}
    assert fault_ts == positives
    per_window = 1 if arch is Architecture.CENTRALIZED else 3
    assert sum(stage == "fault" for _, stage, _ in log.calls) == per_window * len(positives)
    assert all(r.fault_call is None for r in results if not r.detection.anomalous)


@pytest.mark.parametrize("arch", list(Architecture))
def test_oracle_end_to_end_perfect(series, arch):
    results = run_agent(series, AgentConfig(architecture=arch), OracleProvider(series))
    scores = score_results(results, series)
    for rep in (scores.anomaly, scores.faults):
        assert rep.precision == rep.recall == rep.f1 == 1.0


def test_unparseable_then_negative(series):
    calls = []

    def fn(request):
        calls.append(1)
        return "I cannot tell."

    view = windows(series, 36)[80]
    res = diagnose(view, AgentConfig(max_retries=2), FunctionProvider(fn))
    assert len(calls) == 3
    assert not res.failed and res.predicted_anomaly is False and res.fault_call is None
    assert len(res.errors) == 3 and all("unparseable" in e for e in res.errors)


def test_retry_recovers(series):
    replies = iter(["hmm", "Predicted anomaly: False"])
    res = diagnose(windows(series, 36)[0], AgentConfig(max_retries=1), FunctionProvider(lambda r: next(replies)))
    assert res.predicted_anomaly is False and len(res.errors) == 1


def test_transport_failure_marks_window_failed(series):
    def fn(request):
        raise TransportError("timeout")

    res = diagnose(windows(series, 36)[0], AgentConfig(max_retries=2), FunctionProvider(fn))
    assert res.failed and res.predicted_anomaly is None and res.predicted_faults is None
    assert len(res.errors) == 3


def test_failed_windows_excluded_from_metrics(series):
    oracle = OracleProvider(series)

    def fn(request):
        if request.meta["t"] % 10 == 0:
            raise TransportError("flaky")
        return oracle.complete(request)

    results = run_agent(series, AgentConfig(max_retries=0), FunctionProvider(fn))
    scores = score_results(results, series)
    n_failed = sum(r.failed for r in results)
    assert n_failed == scores.anomaly.n_failed > 0
    assert scores.anomaly.tp + scores.anomaly.fp + scores.anomaly.tn + scores.anomaly.fn == len(results) - n_failed
    assert scores.anomaly.f1 == 1.0


@pytest.mark.parametrize("target", list(FaultType))
def test_decentralized_merge_independence(series, target):
    oracle = OracleProvider(series)

    def flip(request):
        reply = oracle.complete(request)
        if request.meta["stage"] == "fault" and request.meta["faults"] == [target.value]:
            truth = "true" in reply.split("\n")[0]
            return oracle_fault_reply({target: not truth})
        return reply

    cfg = AgentConfig(architecture="decentralized")
    base = run_agent(series, cfg, oracle)
    pert = run_agent(series, cfg, FunctionProvider(flip))
    idx = list(FaultType).index(target)
    changed = 0
    for a, b in zip(base, pert):
        if a.fault_call is None:
            assert b.fault_call is None
            continue
        for i in range(3):
            if i == idx:
                changed += a.fault_call.flags()[i] != b.fault_call.flags()[i]
            else:
                assert a.fault_call.flags()[i] == b.fault_call.flags()[i]
    assert changed == sum(a.fault_call is not None for a in base)


def test_reference_reaches_stage_one_only(series):
    seen = []

    def fn(request):
        seen.append((request.meta["stage"], "Reference sensor statistics:" in request.user_text))
        return oracle_anomaly_reply(True) if request.meta["stage"] == "anomaly" else oracle_fault_reply(
            {f: False for f in FaultType}
        )

    cfg = AgentConfig(representation=Representation("stats", "stats"))
    diagnose(windows(series, 36)[0], cfg, FunctionProvider(fn), make_reference(series, 36))
    assert seen == [("anomaly", True), ("fault", False)]


def test_reference_required_when_configured(series):
    with pytest.raises(ValueError):
        run_agent(series, AgentConfig(representation=Representation("stats", "stats")), OracleProvider(series))


def test_in_flight_bound(series):
    oracle = OracleProvider(series)
    state = {"now": 0, "peak": 0}
    lock = threading.Lock()

    def fn(request):
        with lock:
            state["now"] += 1
            state["peak"] = max(state["peak"], state["now"])
        time.sleep(0.002)
        with lock:
            state["now"] -= 1
        return oracle.complete(request)

    views = windows(series, 36)[:40]
    results = run_agent(series, AgentConfig(max_in_flight=3), FunctionProvider(fn), views=views)
    assert 1 < state["peak"] <= 3
    assert [r.t for r in results] == [v.t for v in views]


def test_config_validation():
    with pytest.raises(ValueError):
        AgentConfig(max_retries=-1)
    with pytest.raises(ValueError):
        AgentConfig(window_size=1)
