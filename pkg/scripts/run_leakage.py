#!/usr/bin/env python3
"""Leakage and non-leaked bits per packet (nlb) for Puzzle and ASBG under planned movement.

    python scripts/run_leakage.py --seed 0 --out results/leakage
    python scripts/run_leakage.py --seed 0 --no-movement   # sanity baseline
"""

import argparse

from puzzlekey.config import ExperimentConfig, load_config, replace_fields
from puzzlekey.experiments import run_leakage
from puzzlekey.reports import write_result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--config", default=None)
    ap.add_argument("--n-packets", type=int, default=None)
    ap.add_argument("--no-movement", action="store_true")
    ap.add_argument("--out", default="results/leakage")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = replace_fields(
        cfg,
        seed=args.seed,
        n_packets=args.n_packets,
        movement_enabled=False if args.no_movement else None,
    )
    res = run_leakage(cfg)
    write_result(res, args.out)

    print(f"{'d/lambda':>8} {'Puz leak':>9} {'Puz nlb':>9} {'ASBG leak':>10} {'ASBG nlb':>10}")
    for r in res.tables["leakage"]:
        print(
            f"{r['distance_wavelengths']:>8.2f} {r['puzzle_leakage']:>9.3f}"
            f" {r['puzzle_non_leaked_bits_per_pkt']:>9.3f}"
            f" {r.get('asbg_leakage', float('nan')):>10.3f}"
            f" {r.get('asbg_non_leaked_bits_per_pkt', float('nan')):>10.3f}"
        )


if __name__ == "__main__":
    main()
