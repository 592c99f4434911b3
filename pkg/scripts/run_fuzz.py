"""Falsification fuzz over the random algebra families; writes a JSON summary.

    python scripts/run_fuzz.py --trials 20 --out fuzz_summary.json
"""
import argparse
import time
from pathlib import Path

from nchinf.certifier import FAMILIES, falsification_fuzz
from nchinf.io import dumps


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--families", default=",".join(FAMILIES))
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    args = p.parse_args()

    families = tuple(args.families.split(","))
    t0 = time.perf_counter()
    summary = falsification_fuzz(families, (args.n_min, args.n_max), args.trials, args.seed)
    elapsed = time.perf_counter() - t0

    for fam, counts in summary["per_family"].items():
        print(f"{fam:<22} " + "  ".join(f"{k}={v}" for k, v in counts.items()))
    print(f"falsifications: {summary['falsifications']}  ({elapsed:.1f} s)")
    if args.out is not None:
        args.out.write_text(dumps(summary) + "\n")
        print(f"wrote {args.out}")
    return 1 if summary["falsifications"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
