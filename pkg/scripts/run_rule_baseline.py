"""Rule baseline over several seeds and window sizes; no model calls.

Prints anomaly and micro fault metrics, plus the all-fire reference row
(precision equal to prevalence, recall 1).
"""

import argparse

from hvac_phm.dataset import run_scenario
from hvac_phm.evaluation import run_rule, score_anomaly, score_results, truths_for
from hvac_phm.scenarios import default_scenario, step_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=["default", "step"], default="step")
    ap.add_argument("--seeds", type=int, nargs="+", default=[42, 43, 44, 45, 46])
    ap.add_argument("--windows", type=int, nargs="+", default=[24, 36, 48])
    args = ap.parse_args()

    make = step_scenario if args.preset == "step" else default_scenario
    print("seed window | anom P   R    F1   | all-fire P   F1   | fault P  R    F1")
    for seed in args.seeds:
        series = run_scenario(make().with_seed(seed))
        for w in args.windows:
            results = run_rule(series, w)
            scores = score_results(results, series)
            truths = [t.anomaly for t in truths_for(results, series)]
            fire = score_anomaly([True] * len(truths), truths)
            a, f = scores.anomaly, scores.faults
            print(
                f"{seed:4d} {w:6d} | {a.precision:.2f} {a.recall:.2f} {a.f1:.2f} "
                f"| {fire.precision:.2f} {fire.f1:.2f} | {f.precision:.2f} {f.recall:.2f} {f.f1:.2f}"
            )


if __name__ == "__main__":
    main()
