"""Continual-learning experiment: 20 one-day cycles with feedback memory.

    python scripts/run_continual.py --mock oracle --out runs/continual
    python scripts/run_continual.py --compare-no-memory --out runs/continual

With --compare-no-memory a second run with memory_cap=0 is written to
<out>/no_memory so the two accuracy curves can be compared.
"""

import argparse
from pathlib import Path

from hvac_phm.agents import AgentConfig, HTTPProvider, OracleProvider
from hvac_phm.continual import DEFAULT_MEMORY_CAP, run_cycles, write_cycle_outputs
from hvac_phm.dataset import Representation, run_scenario
from hvac_phm.scenarios import continual_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--days", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--window", type=int, default=24)
    ap.add_argument("--memory-cap", type=int, default=DEFAULT_MEMORY_CAP)
    ap.add_argument("--model", default="gpt-4o")
    ap.add_argument("--mock", choices=["oracle"], default=None)
    ap.add_argument("--compare-no-memory", action="store_true")
    ap.add_argument("--out", default="runs/continual")
    args = ap.parse_args()

    series = run_scenario(continual_scenario(seed=args.seed, days=args.days))
    provider = OracleProvider(series) if args.mock else HTTPProvider.from_env()
    cfg = AgentConfig(model_name=args.model, representation=Representation("stats"), window_size=args.window)

    runs = {Path(args.out): args.memory_cap}
    if args.compare_no_memory:
        runs[Path(args.out) / "no_memory"] = 0
    for out, cap in runs.items():
        reports = run_cycles(series, cfg, provider, cycle_length=24, memory_cap=cap)
        write_cycle_outputs(reports, out)
        print(f"memory_cap={cap}")
        for r in reports:
            print(f"  day {r.cycle + 1:2d}  accuracy={r.accuracy:.3f}  windows={r.n_windows}  memory={r.feedback_memory_size}")


if __name__ == "__main__":
    main()
