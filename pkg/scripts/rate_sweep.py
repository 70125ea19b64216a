#!/usr/bin/env python3
"""Log-log slope of the averaged squared gradient norm against T.

Small sigma0 should give roughly 1/T even when sigma1 is large; sigma0 = 1
should give roughly 1/sqrt(T).
"""
import argparse
import sys

import numpy as np

from adasgd import AdaSgdConfig, BoundedAffine, quadratic
from adasgd.verify import rate_fit_experiment

CASES = [  # (sigma0, sigma1, slope interval)
    (0.0, 0.5, (-np.inf, -0.85)),
    (0.0, 1.0, (-np.inf, -0.85)),
    (1.0, 0.0, (-0.65, -0.35)),
    (1.0, 1.0, (-0.65, -0.35)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    problem = quadratic(np.linspace(0.1, 1.0, 10), rotation_seed=3)
    grid = [2**k for k in range(8, 15)]
    w1 = np.full(10, 0.3)
    ok = True
    for s0, s1, (lo, hi) in CASES:
        fit = rate_fit_experiment(problem, BoundedAffine(s0, s1), AdaSgdConfig(1.0, 1.0), grid,
                                  args.trials, args.seed, "grad_avg", w1)
        good = lo <= fit.slope <= hi
        ok &= good
        print(f"sigma0={s0} sigma1={s1}: slope {fit.slope:+.4f} +- {fit.stderr:.4f}  "
              f"target [{lo}, {hi}]  {'pass' if good else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
