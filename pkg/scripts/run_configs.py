#!/usr/bin/env python3
"""Run every JSON config under configs/ (or the ones given) and tabulate exit statuses.

    python scripts/run_configs.py [--output-root runs] [configs/*.json ...]
"""
import argparse
import sys
import time
from pathlib import Path

from adasgd.cli import run_config

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("configs", nargs="*")
    ap.add_argument("--output-root", default=str(ROOT / "runs"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    paths = [Path(p) for p in args.configs] or sorted((ROOT / "configs").glob("*.json"))
    statuses = {}
    for path in paths:
        print(f"== {path.name}")
        t0 = time.perf_counter()
        statuses[path.name] = run_config(str(path), out_override=str(Path(args.output_root) / path.stem), jobs=args.jobs)
        print(f"   status {statuses[path.name]}  ({time.perf_counter() - t0:.1f}s)\n")
    width = max(map(len, statuses))
    for name, code in statuses.items():
        print(f"{name:<{width}}  {'pass' if code == 0 else 'FAIL' if code == 1 else 'ERROR'}")
    return max(statuses.values(), default=0)


if __name__ == "__main__":
    sys.exit(main())
