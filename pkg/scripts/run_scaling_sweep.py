#!/usr/bin/env python3
"""Scaling comparison: private mechanism vs input perturbation.

Sweeps path-like partial 2-trees over a doubling size grid and fits log-log
slopes of the median max error. Writes <out>.csv and <out>.json.
"""

import argparse
import time

from dpapsd.experiment import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512,1024,2048")
    parser.add_argument("--trials", type=int, default=25)
    parser.add_argument("--epsilon", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=20250809)
    parser.add_argument("--out", default="scaling_sweep")
    args = parser.parse_args()

    config = ExperimentConfig(
        sizes=tuple(int(x) for x in args.sizes.split(",")),
        width=2,
        trials=args.trials,
        epsilon=args.epsilon,
        mechanisms=("main", "input-perturbation"),
        seed=args.seed,
        attachment="chain",
        edge_keep_prob=1.0,
        weight_range=(10.0, 20.0),
    )
    start = time.time()
    report = run_experiment(
        config, csv_path=f"{args.out}.csv", json_path=f"{args.out}.json"
    )
    for mech in config.mechanisms:
        meds = ", ".join(
            f"n={n}: {report.medians[(mech, n)]:.4g}" for n in config.sizes
        )
        print(f"{mech}: slope {report.slopes[mech]:.3f}  medians {meds}")
    print(f"done in {time.time() - start:.0f}s -> {args.out}.csv / {args.out}.json")


if __name__ == "__main__":
    main()
