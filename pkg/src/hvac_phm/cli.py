"""Command-line entry point: ``hvac-phm {simulate,detect,classify,continual,grid}``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 provider failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__
from .agents.pipeline import AgentConfig, Architecture, run_agent
from .agents.providers import HTTPProvider, OracleProvider, ProviderConfigError, TranscriptProvider
from .continual import DEFAULT_MEMORY_CAP, run_cycles, write_cycle_outputs
from .dataset import DataError, Representation, export_csv, import_csv, make_reference, run_scenario
from .evaluation import ExperimentGrid, run_grid, run_rule, score_results, write_grid_outputs
from .scenarios import continual_scenario, default_scenario, dump_scenario, load_scenario, step_scenario
from .sim import ConfigError

log = logging.getLogger("hvac_phm")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PROVIDER = 4

PRESETS = {"default": default_scenario, "step": step_scenario, "continual": continual_scenario}


class ProviderFailure(RuntimeError):
    pass


def write_manifest(out_dir: Path, args, artifacts, seed=None) -> Path:
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:] if args.argv is None else args.argv,
        "config": getattr(args, "config", None),
        "data": getattr(args, "data", None),
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "artifacts": sorted(str(Path(p).relative_to(out_dir)) for p in artifacts),
        "tool_version": __version__,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def make_provider(args, series):
    mock = args.mock
    if mock == "oracle":
        return OracleProvider(series)
    if mock and mock.startswith("transcript:"):
        return TranscriptProvider(mock.split(":", 1)[1])
    if mock:
        raise ConfigError("--mock", f"expected 'oracle' or 'transcript:<path>', got {mock!r}")
    return HTTPProvider.from_env(timeout=args.timeout)


def agent_config(args, window_default: int = 36) -> AgentConfig:
    try:
        representation = Representation(args.repr, args.reference)
        return AgentConfig(
            model_name=args.model,
            architecture=Architecture(args.arch),
            representation=representation,
            window_size=args.window or window_default,
            max_retries=args.max_retries,
            timeout=args.timeout,
            max_in_flight=args.max_in_flight,
        )
    except ValueError as exc:
        raise ConfigError("agent", str(exc)) from None


def write_transcripts(path: Path, results) -> None:
    with open(path, "w") as fh:
        for res in results:
            for ex in res.exchanges:
                fh.write(json.dumps(ex) + "\n")


def write_windows(path: Path, results, series) -> None:
    pos = {int(t): i for i, t in enumerate(series.timestamps)}
    lines = ["t,anomaly_true,anomaly_pred,leak_true,leak_pred,comp_true,comp_pred,filter_true,filter_pred,failed"]
    for r in results:
        truth = series.truth(pos[r.t])
        pa = r.predicted_anomaly
        pf = r.predicted_faults or (None, None, None)
        cols = [r.t, truth.anomaly, pa, truth.leak_active, pf[0], truth.comp_active, pf[1], truth.filter_active, pf[2], r.failed]
        lines.append(",".join("" if c is None else str(int(c)) for c in cols))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config) if args.config else PRESETS[args.preset]()
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    series = run_scenario(scenario)
    out = _out_dir(args)
    data_path = out / "series.csv"
    scen_path = out / "scenario.yaml"
    export_csv(series, data_path)
    dump_scenario(scenario, scen_path)
    write_manifest(out, args, [data_path, scen_path], seed=scenario.config.seed)
    log.info("wrote %d rows to %s", len(series), data_path)
    return EXIT_OK


def _run_detector(args, run_faults: bool) -> int:
    series = import_csv(args.data)
    out = _out_dir(args)
    artifacts = []
    if args.detector == "rule":
        results = run_rule(series, args.window or 36, args.stride)
    else:
        cfg = agent_config(args)
        provider = make_provider(args, series)
        reference = make_reference(series, cfg.window_size) if cfg.needs_reference else None
        results = run_agent(series, cfg, provider, reference, stride=args.stride, run_faults=run_faults)
        tpath = out / "transcripts.jsonl"
        write_transcripts(tpath, results)
        artifacts.append(tpath)
    scores = score_results(results, series)
    metrics = {"anomaly": scores.anomaly.to_dict()}
    if run_faults:
        metrics = scores.to_dict()
    mpath, wpath = out / "metrics.json", out / "windows.csv"
    mpath.write_text(json.dumps(metrics, indent=2))
    write_windows(wpath, results, series)
    errors = [{"t": r.t, "failed": r.failed, "errors": r.errors} for r in results if r.errors]
    epath = out / "errors.json"
    epath.write_text(json.dumps(errors, indent=2))
    artifacts += [mpath, wpath, epath]
    write_manifest(out, args, artifacts)
    headline = scores.faults if run_faults else scores.anomaly
    print(
        f"precision={headline.precision:.4f} recall={headline.recall:.4f} "
        f"f1={headline.f1:.4f} accuracy={headline.accuracy:.4f} failed={headline.n_failed}"
    )
    if results and all(r.failed for r in results):
        raise ProviderFailure("every window failed to evaluate")
    return EXIT_OK


def cmd_detect(args) -> int:
    return _run_detector(args, run_faults=False)


def cmd_classify(args) -> int:
    return _run_detector(args, run_faults=True)


def cmd_continual(args) -> int:
    series = import_csv(args.data)
    cfg = agent_config(args, window_default=24)
    provider = make_provider(args, series)
    reference = make_reference(series, cfg.window_size, min_hours=cfg.window_size) if cfg.needs_reference else None
    kept: list = []
    try:
        reports = run_cycles(series, cfg, provider, args.cycle_hours, args.memory_cap, reference, keep_results=kept)
    except ValueError as exc:
        raise ConfigError("continual", str(exc)) from None
    out = _out_dir(args)
    paths = write_cycle_outputs(reports, out)
    tpath = out / "transcripts.jsonl"
    write_transcripts(tpath, [r for cycle in kept for r in cycle])
    write_manifest(out, args, [*paths.values(), tpath])
    for r in reports:
        print(f"cycle {r.cycle:2d} accuracy={r.accuracy:.3f} memory={r.feedback_memory_size}")
    if all(rec["failed"] for r in reports for rec in r.records):
        raise ProviderFailure("every window failed to evaluate")
    return EXIT_OK


def cmd_grid(args) -> int:
    try:
        raw = yaml.safe_load(Path(args.config).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError("--config", str(exc)) from None
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "grid file must be a mapping")
    data_key = raw.pop("data", None)
    grid = ExperimentGrid.from_mapping(raw)
    data_path = args.data or (str((Path(args.config).parent / data_key)) if data_key else None)
    if data_path:
        series = import_csv(data_path)
    else:
        series = run_scenario(default_scenario())
    needs_agent = any(c.detector == "agent" for c in grid.cells)
    provider = make_provider(args, series) if needs_agent else None
    results = run_grid(grid, series, provider)
    out = _out_dir(args)
    paths = write_grid_outputs(results, out, grid.sort_by)
    write_manifest(out, args, paths.values())
    print(paths["anomaly_table"].read_text() if grid.sort_by == "anomaly" else paths["fault_table"].read_text())
    if all(r.scores is None for r in results):
        raise ProviderFailure("every grid cell failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _agent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, default=None, help="history window in hours")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--repr", choices=["raw", "stats", "both"], default="stats")
    p.add_argument("--reference", choices=["none", "raw", "stats", "both"], default="none")
    p.add_argument("--arch", choices=["centralized", "decentralized"], default="centralized")
    p.add_argument("--model", default="gpt-4o")
    p.add_argument("--mock", default=None, help="'oracle' or 'transcript:<path>'")
    p.add_argument("--max-retries", type=int, default=2)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--max-in-flight", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hvac-phm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a labeled sensor series")
    p.add_argument("--config", help="scenario YAML; defaults to --preset")
    p.add_argument("--preset", choices=sorted(PRESETS), default="default")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    for name, func, help_ in (
        ("detect", cmd_detect, "anomaly detection over sliding windows"),
        ("classify", cmd_classify, "two-stage anomaly detection + fault classification"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--data", required=True)
        p.add_argument("--detector", choices=["rule", "agent"], default="rule")
        p.add_argument("--out", required=True)
        _agent_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("continual", help="continual-learning feedback cycles")
    p.add_argument("--data", required=True)
    p.add_argument("--cycle-hours", type=int, default=24)
    p.add_argument("--memory-cap", type=int, default=DEFAULT_MEMORY_CAP)
    p.add_argument("--out", required=True)
    _agent_flags(p)
    p.set_defaults(func=cmd_continual)

    p = sub.add_parser("grid", help="run an experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--data", default=None)
    p.add_argument("--out", required=True)
    _agent_flags(p)
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = list(argv) if argv is not None else None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ProviderConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProviderFailure as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER


if __name__ == "__main__":
    sys.exit(main())
