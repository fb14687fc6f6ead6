#!/usr/bin/env python3
"""Run every toy attack over a batch of seeds and print one summary line each.

Usage: python3 scripts/run_attacks.py [--trials 20] [--seed 0] [--workers 4]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from offline_simon import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    for kind in cli.ATTACK_KINDS:
        cfg = cli.RunConfig(subcommand="attack", kind=kind, trials=args.trials,
                            seed=args.seed, workers=args.workers,
                            out=f"/tmp/attack-{kind}.json")
        cli.cmd_attack(cfg)
        import json
        doc = json.loads(Path(cfg.out).read_text())
        s = doc["summary"]
        print(f"{kind:12s} verified {s['verified']:3d}/{s['runs']:3d} "
              f"(rate {s['success_rate']:.2f}, screened {s['screened_instances']})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
