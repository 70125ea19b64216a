#!/usr/bin/env python3
"""Final iterate of the forced one-dimensional construction against two closed forms."""
import argparse
import math

from adasgd.verify import lower_bound_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--T", type=int, default=10_000)
    args = ap.parse_args()
    gammas = [args.sigma, 4 * args.sigma, 16 * args.sigma, args.sigma * math.sqrt(args.T)]
    res = lower_bound_experiment(args.sigma, gammas, args.T)
    print(f"sigma={res.sigma} T={res.T} beta={res.beta:.3e}")
    print(f"{'gamma':>8} {'w_T+1':>12} {'w*gamma/sigma':>14} {'half sum':>12} {'rel err':>9} {'full sum':>12} {'rel err':>9}")
    for r in res.rows:
        print(f"{r.gamma:>8.3g} {r.w_final:>12.6g} {r.normalized:>14.4f} {r.half_sum:>12.6g} "
              f"{r.rel_err_half_sum:>9.4f} {r.full_sum:>12.6g} {r.rel_err_full_sum:>9.2e}")
    print(f"nonnegative iterates: {res.nonnegative}  normalized >= 1/4: {res.normalized_ok}  monotone: {res.monotone}")


if __name__ == "__main__":
    main()
