"""Run one of the experiment grids in scripts/grids/ on a simulated series.

    python scripts/run_grid.py representation --mock oracle --out runs/repr
    python scripts/run_grid.py architecture --out runs/arch      # live provider

Live runs need PHM_PROVIDER_TOKEN (and optionally PHM_PROVIDER_URL).
"""

import argparse
from pathlib import Path

from hvac_phm.agents.providers import HTTPProvider, OracleProvider, TranscriptProvider
from hvac_phm.dataset import import_csv, run_scenario
from hvac_phm.evaluation import load_grid, run_grid, write_grid_outputs
from hvac_phm.scenarios import default_scenario, load_scenario

GRIDS = Path(__file__).parent / "grids"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("grid", help="grid name in scripts/grids/ or a YAML path")
    ap.add_argument("--scenario", help="scenario YAML (default: built-in 10-day scenario)")
    ap.add_argument("--data", help="series CSV; overrides --scenario")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--mock", default=None, help="'oracle' or 'transcript:<path>'")
    ap.add_argument("--out", default="runs/grid")
    args = ap.parse_args()

    path = Path(args.grid)
    if not path.exists():
        path = GRIDS / f"{args.grid}.yaml"
    grid = load_grid(path)

    if args.data:
        series = import_csv(args.data)
    else:
        scenario = load_scenario(args.scenario) if args.scenario else default_scenario()
        if args.seed is not None:
            scenario = scenario.with_seed(args.seed)
        series = run_scenario(scenario)

    if args.mock == "oracle":
        provider = OracleProvider(series)
    elif args.mock and args.mock.startswith("transcript:"):
        provider = TranscriptProvider(args.mock.split(":", 1)[1])
    else:
        provider = HTTPProvider.from_env()

    results = run_grid(grid, series, provider)
    paths = write_grid_outputs(results, args.out, grid.sort_by)
    print(paths["anomaly_table"].read_text())
    print(paths["fault_table"].read_text())


if __name__ == "__main__":
    main()
