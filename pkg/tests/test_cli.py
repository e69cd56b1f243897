import json

import pytest

from hvac_phm.agents.providers import TOKEN_ENV
from hvac_phm.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--out", str(out)]) == EXIT_OK
    return out / "series.csv"


@pytest.fixture(scope="module")
def continual_data(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim20")
    assert main(["simulate", "--preset", "continual", "--out", str(out)]) == EXIT_OK
    return out / "series.csv"


def test_simulate_outputs(data):
    lines = data.read_text().splitlines()
    assert len(lines) == 241
    manifest = json.loads((data.parent / "manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["command"] == "simulate"
    assert "series.csv" in manifest["artifacts"]


def test_simulate_reproducible(data, tmp_path):
    assert main(["simulate", "--config", str(data.parent / "scenario.yaml"), "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "series.csv").read_bytes() == data.read_bytes()


def test_simulate_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("alpha: 7\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "alpha" in capsys.readouterr().err


def test_missing_data_file(tmp_path):
    assert main(["detect", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == EXIT_DATA


def test_rule_detect(data, tmp_path):
    assert main(["detect", "--data", str(data), "--detector", "rule", "--out", str(tmp_path)]) == EXIT_OK
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["anomaly"]["recall"] >= 0.95
    assert len((tmp_path / "windows.csv").read_text().splitlines()) == 206


def test_agent_oracle_classify(data, tmp_path, capsys):
    args = ["classify", "--data", str(data), "--detector", "agent", "--mock", "oracle", "--arch", "decentralized",
            "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["anomaly"]["f1"] == 1.0 and metrics["faults"]["f1"] == 1.0
    assert "f1=1.0000" in capsys.readouterr().out


def test_transcript_replay_reproduces(data, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    base = ["classify", "--data", str(data), "--detector", "agent", "--window", "24", "--repr", "both"]
    assert main(base + ["--mock", "oracle", "--out", str(first)]) == EXIT_OK
    assert main(base + ["--mock", f"transcript:{first / 'transcripts.jsonl'}", "--out", str(second)]) == EXIT_OK
    for name in ("metrics.json", "windows.csv", "transcripts.jsonl"):
        assert (first / name).read_text() == (second / name).read_text()


def test_missing_token_is_config_error(data, tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(TOKEN_ENV, raising=False)
    assert main(["detect", "--data", str(data), "--detector", "agent", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert TOKEN_ENV in capsys.readouterr().err


def test_continual_cli(continual_data, tmp_path):
    args = ["continual", "--data", str(continual_data), "--mock", "oracle", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    rows = (tmp_path / "accuracy.csv").read_text().splitlines()
    assert len(rows) == 21


def test_grid_cli(data, tmp_path):
    cfg = tmp_path / "grid.yaml"
    cfg.write_text(
        "cells:\n"
        "  - {detector: rule, window_size: 36}\n"
        "  - {detector: agent, representation: stats, reference_mode: stats, window_size: 36}\n"
    )
    out = tmp_path / "out"
    assert main(["grid", "--config", str(cfg), "--data", str(data), "--mock", "oracle", "--out", str(out)]) == EXIT_OK
    results = json.loads((out / "results.json").read_text())
    assert [c["cell"]["detector"] for c in results["cells"]] == ["agent", "rule"]
    assert json.loads((out / "manifest.json").read_text())["command"] == "grid"
