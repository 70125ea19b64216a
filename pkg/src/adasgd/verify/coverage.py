"""Monte-Carlo coverage of the high-probability theorems.

A trial violates the uniform bound when max_{t<=T+1} f(w_t) - f* > F
(thm1, thm5) or max_{t<=T+1} ||w_t - w*|| > D (thm2). The rate inequality of
each theorem is tallied separately.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import bounds
from ..errors import ConfigurationError
from ..optimizer import AdaSgdConfig, AlgorithmConfig, KnownParamConfig, run_batch
from ..rng import RngStream
from .common import analysis_noise, at_horizon, binomial_margin, check_tuned, chunks

THEOREMS = ("thm1", "thm2", "thm5")


@dataclass
class CoverageResult:
    theorem: str
    trials: int
    violations: int
    delta: float
    bound: float
    worst: float
    rate_bound: float
    rate_violations: int
    worst_rate: float
    violating_trials: list[int] = field(default_factory=list)
    per_trial: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def frequency(self) -> float:
        return self.violations / self.trials

    @property
    def rate_frequency(self) -> float:
        return self.rate_violations / self.trials

    @property
    def threshold(self) -> float:
        return self.delta + binomial_margin(self.delta, self.trials)

    @property
    def passed(self) -> bool:
        return self.frequency <= self.threshold

    def summary(self) -> dict:
        return {
            "theorem": self.theorem,
            "trials": self.trials,
            "delta": self.delta,
            "bound": self.bound,
            "worst": self.worst,
            "violations": self.violations,
            "frequency": self.frequency,
            "threshold": self.threshold,
            "rate_bound": self.rate_bound,
            "worst_rate": self.worst_rate,
            "rate_violations": self.rate_violations,
            "rate_frequency": self.rate_frequency,
            "violating_trials": list(self.violating_trials),
            "passed": self.passed,
        }


def theorem_bounds(theorem: str, problem, oracle, config: AlgorithmConfig, T: int, delta: float, w1) -> tuple[float, float]:
    """(uniform bound, rate bound) for the given setup."""
    bounds.check_theorem_delta(theorem, delta)
    noise = analysis_noise(oracle, T, delta)
    w1 = np.asarray(w1, dtype=np.float64)
    delta1 = float(problem.gap(w1))
    d1 = 0.0 if problem.minimizer is None else math.sqrt(float(problem.dist_sq(w1)))
    if theorem == "thm5":
        if not isinstance(config, KnownParamConfig):
            raise ConfigurationError("thm5 runs SGD with the tuned stepsize")
        check_tuned(config, problem, noise, T, delta)
        p = bounds.BoundInputs(problem.beta, noise.sigma0, noise.sigma1, config.stepsize, 1.0, T, delta,
                               delta1, d1, config.alpha)
        return bounds.known_f_bound(p), bounds.known_rate_rhs(p)
    if not isinstance(config, AdaSgdConfig):
        raise ConfigurationError(f"{theorem} runs AdaSGD")
    p = bounds.BoundInputs(problem.beta, noise.sigma0, noise.sigma1, config.eta, config.gamma, T, delta, delta1, d1)
    if theorem == "thm1":
        F = bounds.f_bound(p)
        return F, bounds.nonconvex_rate_rhs(p, F)
    if not problem.convex or problem.minimizer is None:
        raise ConfigurationError("thm2 needs a convex problem with a known minimizer")
    D2 = bounds.d_bound_sq(p)
    return math.sqrt(D2), bounds.convex_rate_rhs(p, D2)


def _chunk_stats(args):
    theorem, problem, oracle, config, T, seed, lo, hi, w1 = args
    streams = [RngStream(seed, i) for i in range(lo, hi)]
    traj = run_batch(problem, oracle, config, T, streams, w1)
    if theorem == "thm2":
        uniform = np.sqrt(np.max(traj.dist_sq, axis=1))
        rate = traj.avg_gap
    else:
        uniform = np.max(traj.f_gap, axis=1)
        rate = np.mean(traj.grad_norm_sq[:, :-1], axis=1)
    return uniform, rate


def coverage_experiment(
    theorem: str,
    problem,
    oracle,
    config: AlgorithmConfig,
    T: int,
    delta: float,
    trials: int,
    seed: int,
    w1=None,
    jobs: int = 1,
) -> CoverageResult:
    if theorem not in THEOREMS:
        raise ConfigurationError(f"unknown theorem {theorem!r}")
    if trials < 100:
        raise ConfigurationError("coverage needs at least 100 trials")
    oracle = at_horizon(oracle, T)
    w1 = np.zeros(problem.dimension) if w1 is None else np.asarray(w1, dtype=np.float64)
    bound, rate_bound = theorem_bounds(theorem, problem, oracle, config, T, delta, w1)
    work = [(theorem, problem, oracle, config, T, seed, lo, hi, w1) for lo, hi in chunks(trials, T)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk_stats, work))
    else:
        parts = [_chunk_stats(a) for a in work]
    uniform = np.concatenate([u for u, _ in parts])
    rate = np.concatenate([r for _, r in parts])
    bad = uniform > bound
    rate_bad = rate > rate_bound
    return CoverageResult(
        theorem=theorem,
        trials=trials,
        violations=int(bad.sum()),
        delta=delta,
        bound=bound,
        worst=float(uniform.max()),
        rate_bound=rate_bound,
        rate_violations=int(rate_bad.sum()),
        worst_rate=float(rate.max()),
        violating_trials=[int(i) for i in np.flatnonzero(bad | rate_bad)],
        per_trial={
            "trial": np.arange(trials),
            "uniform_stat": uniform,
            "rate_stat": rate,
            "violated": bad.astype(int),
            "rate_violated": rate_bad.astype(int),
        },
    )
