"""One-dimensional construction driving AdaSGD Omega(sigma/gamma) from the minimizer.

f(w) = (beta/2) w^2 with tiny beta, w_1 = w* = 0, eta = 1, and the two-point
oracle forced onto its low branch g = beta w - sigma/(T-1) at every step. The
all-low event has probability about 1/e and the construction's conclusion is
a statement about that event, so it is realized deterministically here rather
than by rejection over runs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidInput
from ..objectives import lower_bound_quad
from ..optimizer import AdaSgdConfig, run
from ..oracles import TwoPointAdversarial
from ..rng import RngStream


def offset(sigma: float, gamma: float, T: int) -> float:
    return gamma**2 * (T - 1) ** 2 / sigma**2


def full_sum_prediction(sigma: float, gamma: float, T: int) -> float:
    """sum_{t<=T} (gamma^2 (T-1)^2 / sigma^2 + t)^(-1/2): the forced run with the beta term dropped."""
    t = np.arange(1, T + 1, dtype=np.float64)
    return float(np.sum(1.0 / np.sqrt(offset(sigma, gamma, T) + t)))


def half_sum_prediction(sigma: float, gamma: float, T: int) -> float:
    """(1/2) sum_{t<=T} (gamma^2 (T-1)^2 / sigma^2 + t)^(-1/2)."""
    return 0.5 * full_sum_prediction(sigma, gamma, T)


def integral_lower_bound(sigma: float, gamma: float, T: int) -> float:
    """sqrt(a + T + 1) - sqrt(a + 1) with a = gamma^2 (T-1)^2 / sigma^2."""
    a = offset(sigma, gamma, T)
    return math.sqrt(a + T + 1) - math.sqrt(a + 1)


@dataclass(frozen=True)
class LowerBoundRow:
    gamma: float
    w_final: float
    normalized: float
    half_sum: float
    integral_bound: float
    rel_err_half_sum: float
    full_sum: float
    rel_err_full_sum: float
    min_iterate: float


@dataclass
class LowerBoundResult:
    sigma: float
    T: int
    beta: float
    rows: list[LowerBoundRow]

    @property
    def nonnegative(self) -> bool:
        return all(r.min_iterate >= 0 for r in self.rows)

    @property
    def normalized_ok(self) -> bool:
        """w_{T+1} gamma / sigma >= 1/4 for gamma in [sigma, sigma sqrt(T)]."""
        lo, hi = self.sigma, self.sigma * math.sqrt(self.T)
        return all(r.normalized >= 0.25 for r in self.rows if lo <= r.gamma <= hi * (1 + 1e-12))

    @property
    def monotone(self) -> bool:
        """w_{T+1} strictly increases as gamma decreases."""
        rows = sorted(self.rows, key=lambda r: r.gamma)
        return all(a.w_final > b.w_final for a, b in zip(rows, rows[1:]))

    @property
    def passed(self) -> bool:
        return self.nonnegative and self.normalized_ok and self.monotone

    def summary(self) -> dict:
        return {
            "sigma": self.sigma, "T": self.T, "beta": self.beta,
            "rows": [asdict(r) for r in self.rows],
            "nonnegative": self.nonnegative, "normalized_ok": self.normalized_ok,
            "monotone": self.monotone, "passed": self.passed,
        }


def lower_bound_experiment(sigma: float, gammas, T: int, beta: float | None = None, seed: int = 0) -> LowerBoundResult:
    if T < 2:
        raise InvalidInput("T must be at least 2")
    limit = sigma / T**1.5
    beta = 0.5 * limit if beta is None else beta
    if not 0 < beta < limit:
        raise InvalidInput(f"beta must lie in (0, sigma / T^1.5) = (0, {limit:g})")
    problem = lower_bound_quad(beta)
    oracle = TwoPointAdversarial(sigma, T, force_low=True)
    rows = []
    for gamma in gammas:
        # the forced oracle consumes draws but ignores them, so the stream is immaterial
        traj = run(problem, oracle, AdaSgdConfig(1.0, float(gamma)), T, RngStream(seed), np.zeros(1), keep_iterates=True)
        w_final = float(traj.iterates[-1, 0])
        half = half_sum_prediction(sigma, gamma, T)
        rows.append(LowerBoundRow(
            gamma=float(gamma),
            w_final=w_final,
            normalized=w_final * gamma / sigma,
            half_sum=half,
            integral_bound=integral_lower_bound(sigma, gamma, T),
            rel_err_half_sum=abs(w_final - half) / half,
            full_sum=2 * half,
            rel_err_full_sum=abs(w_final - 2 * half) / (2 * half),
            min_iterate=float(traj.iterates.min()),
        ))
    return LowerBoundResult(sigma, T, beta, rows)
