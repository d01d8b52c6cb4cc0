#!/usr/bin/env python3
"""Bob/Eve code correlation against Eve's distance, one column per bearing.

    python scripts/run_correlation.py --seed 0 --out results/correlation
"""

import argparse

from puzzlekey.config import ExperimentConfig, load_config, replace_fields
from puzzlekey.experiments import run_correlation
from puzzlekey.reports import write_result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--config", default=None)
    ap.add_argument("--n-packets", type=int, default=None)
    ap.add_argument("--out", default="results/correlation")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = replace_fields(cfg, seed=args.seed, n_packets=args.n_packets)
    res = run_correlation(cfg, progress=None)
    write_result(res, args.out)

    print(f"{'d/lambda':>8} {'rho_tap':>8} {'mean':>8} {'min':>8} {'max':>8}")
    for r in res.tables["correlation_mean"]:
        print(
            f"{r['distance_wavelengths']:>8.2f} {r['tap_correlation']:>8.3f}"
            f" {r['mean_code_correlation']:>8.3f} {r['min_code_correlation']:>8.3f}"
            f" {r['max_code_correlation']:>8.3f}"
        )


if __name__ == "__main__":
    main()
