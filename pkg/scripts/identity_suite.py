"""Randomized trace-identity experiment over Q and F5.

Usage: python3 scripts/identity_suite.py [--samples N] [--seed S]
"""

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sl2trace.cli import _identity_suite
from sl2trace.qfield import TowerContext, base_from_spec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    report = {}
    for field in ("q", "fp:5"):
        ctx = TowerContext(base_from_spec(field))
        rng = random.Random(args.seed)
        counts = _identity_suite(ctx, rng, args.samples)
        report[field] = {
            "samples": args.samples,
            "counts": counts,
            "all_pass": all(v == args.samples for v in counts.values()),
        }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if all(r["all_pass"] for r in report.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
