#!/usr/bin/env python3
"""Sweep the false-positive bound: measured p_bad versus the analytic bound
across copy counts, on seeded aperiodic functions.

Usage: python3 scripts/bound_sweep.py [--n 6] [--trials 2000] [--seed 0]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from offline_simon import analysis, simon


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.n
    table = rng.integers(0, 1 << n, size=1 << n, dtype=np.int64)
    while analysis.find_periods(table, n):
        table = rng.integers(0, 1 << n, size=1 << n, dtype=np.int64)
    eps = analysis.epsilon_max(table, n)
    print(f"n={n} eps={eps:.4f} trials={args.trials}")
    print(f"{'c':>3} {'measured':>10} {'bound':>12} {'union':>12}")
    for c in range(1, 6):
        est = simon.p_bad_estimate(table, c, args.trials, rng, n)
        print(f"{c:>3} {est.estimate:>10.5f} {est.analytic_bound:>12.6f} "
              f"{est.union_bound:>12.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
