"""Empirical rate exponents by log-log least squares."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import ConfigurationError
from ..optimizer import AlgorithmConfig, run_batch
from ..rng import RngStream
from .common import at_horizon, chunks

METRICS = ("grad_avg", "avg_gap")
# largest/smallest horizon; 2^8..2^14 is the narrowest grid in use
MIN_SPAN = 64


@dataclass
class RateFit:
    T_grid: np.ndarray
    values: np.ndarray
    slope: float
    stderr: float
    intercept: float
    metric: str

    def summary(self) -> dict:
        return {
            "metric": self.metric,
            "T_grid": [int(t) for t in self.T_grid],
            "values": [float(v) for v in self.values],
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
        }


def fit_loglog(T_grid, values) -> tuple[float, float, float]:
    """(slope, slope standard error, intercept) of log(values) against log(T).

    A non-positive value makes the slope undefined (NaN).
    """
    T_grid = np.asarray(T_grid, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if T_grid.size < 5 or np.any(np.diff(T_grid) <= 0):
        raise ConfigurationError("T grid must be strictly increasing with at least 5 points")
    if np.any(~(values > 0)):
        return math.nan, math.nan, math.nan
    res = stats.linregress(np.log(T_grid), np.log(values))
    return float(res.slope), float(res.stderr), float(res.intercept)


def _metric(traj, metric: str) -> np.ndarray:
    if metric == "grad_avg":
        return np.mean(traj.grad_norm_sq[:, :-1], axis=1)
    return traj.avg_gap


def rate_fit_experiment(
    problem,
    oracle,
    config: AlgorithmConfig,
    T_grid,
    trials: int,
    seed: int,
    metric: str = "grad_avg",
    w1=None,
) -> RateFit:
    """Mean over trials of the metric at each T, then the fitted slope.

    ``grad_avg`` is (1/T) sum_{t<=T} ||grad f(w_t)||^2; ``avg_gap`` is
    f(averaged iterate) - f*. Horizon-dependent oracles and tuned stepsizes are
    re-instantiated at each T.
    """
    if metric not in METRICS:
        raise ConfigurationError(f"unknown metric {metric!r}")
    T_grid = np.asarray(T_grid, dtype=np.int64)
    if T_grid.size and T_grid[-1] < MIN_SPAN * T_grid[0]:
        raise ConfigurationError(f"T grid must span a factor of at least {MIN_SPAN}")
    values = []
    for gi, T in enumerate(T_grid):
        T = int(T)
        orc, cfg = at_horizon(oracle, T), at_horizon(config, T)
        acc = []
        for lo, hi in chunks(trials, T):
            streams = [RngStream(seed, (gi << 32) + i) for i in range(lo, hi)]
            acc.append(_metric(run_batch(problem, orc, cfg, T, streams, w1), metric))
        values.append(float(np.mean(np.concatenate(acc))))
    values = np.array(values)
    slope, se, icpt = fit_loglog(T_grid, values)
    return RateFit(T_grid, values, slope, se, icpt, metric)
