"""Monte-Carlo frequency checks of the two martingale concentration inequalities.

lemma5:  sum_t Z_t <= (3/4) lambda sum_t sigma_t^2 + log(1/delta) / lambda, for a
         martingale difference sequence with |Z_t| <= sigma_t (sigma_t predictable).
lemma14: |sum_{s<=t} (X_s - E[X_s | past])| < sqrt(A_t(delta) sum_{s<=t} (X_s - Xhat_s)^2 + B_t(delta))
         for all t simultaneously, for |X_t| <= 1 and predictable |Xhat_t| <= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bounds import lemma14_ab
from ..errors import ContractViolation, ConfigurationError
from ..rng import RngStream
from .common import binomial_margin

LEMMA5_GENERATORS = ("zero", "rademacher", "uniform", "adaptive")
LEMMA14_GENERATORS = ("coin", "biased_coin", "uniform")


@dataclass
class ConcentrationResult:
    kind: str
    generator: str
    trials: int
    failures: int
    delta: float

    @property
    def frequency(self) -> float:
        return self.failures / self.trials

    @property
    def threshold(self) -> float:
        return self.delta + binomial_margin(self.delta, self.trials)

    @property
    def passed(self) -> bool:
        return self.frequency <= self.threshold

    def summary(self) -> dict:
        return {
            "kind": self.kind, "generator": self.generator, "trials": self.trials,
            "failures": self.failures, "frequency": self.frequency, "delta": self.delta,
            "threshold": self.threshold, "passed": self.passed,
        }


def lemma5_sequences(generator: str, trials: int, T: int, gen: np.random.Generator):
    """(Z, sigma) arrays of shape (trials, T)."""
    if generator == "zero":
        return np.zeros((trials, T)), np.ones((trials, T))
    if generator == "rademacher":
        return gen.choice([-1.0, 1.0], size=(trials, T)), np.ones((trials, T))
    if generator == "uniform":
        return gen.uniform(-1.0, 1.0, (trials, T)), np.ones((trials, T))
    if generator == "adaptive":
        # sigma_t depends on the sign of the running sum: large after a rise, small after a fall
        eps = gen.choice([-1.0, 1.0], size=(trials, T))
        Z = np.empty((trials, T))
        sig = np.empty((trials, T))
        run = np.zeros(trials)
        for t in range(T):
            sig[:, t] = np.where(run > 0, 2.0, 0.5)
            Z[:, t] = sig[:, t] * eps[:, t]
            run += Z[:, t]
        return Z, sig
    raise ConfigurationError(f"unknown lemma5 generator {generator!r}")


def lemma14_sequences(generator: str, trials: int, T: int, gen: np.random.Generator):
    """(X, conditional mean, Xhat) arrays of shape (trials, T)."""
    if generator == "coin":
        X = gen.choice([-1.0, 1.0], size=(trials, T))
        return X, np.zeros_like(X), np.zeros_like(X)
    if generator == "biased_coin":
        p = 0.8
        X = np.where(gen.random((trials, T)) < p, 1.0, -1.0)
        mean = np.full_like(X, 2 * p - 1)
        csum = np.cumsum(X, axis=1)
        xhat = np.zeros_like(X)
        xhat[:, 1:] = csum[:, :-1] / np.arange(1, T)  # running mean of the past
        return X, mean, xhat
    if generator == "uniform":
        X = gen.uniform(-1.0, 1.0, (trials, T))
        return X, np.zeros_like(X), np.zeros_like(X)
    raise ConfigurationError(f"unknown lemma14 generator {generator!r}")


def lemma5_holds(Z, sigma, lam: float, delta: float) -> np.ndarray:
    if np.any(np.abs(Z) > sigma):
        raise ContractViolation("generator produced |Z_t| > sigma_t")
    rhs = 0.75 * lam * np.sum(sigma**2, axis=-1) + math.log2(1 / delta) / lam
    return np.sum(Z, axis=-1) <= rhs


def lemma14_holds(X, mean, xhat, delta: float) -> np.ndarray:
    if np.any(np.abs(X) > 1) or np.any(np.abs(xhat) > 1):
        raise ContractViolation("generator produced |X_t| > 1 or |Xhat_t| > 1")
    T = X.shape[-1]
    A, B = lemma14_ab(np.arange(1, T + 1), delta)
    lhs = np.abs(np.cumsum(X - mean, axis=-1))
    rhs = np.sqrt(A * np.cumsum((X - xhat) ** 2, axis=-1) + B)
    return np.all(lhs < rhs, axis=-1)


def concentration_trial(
    kind: str,
    generator: str,
    delta: float,
    trials: int,
    seed: int,
    T: int = 100,
    lam: float = 1.0,
) -> ConcentrationResult:
    gen = RngStream(seed).generator()
    if kind == "lemma5":
        Z, sig = lemma5_sequences(generator, trials, T, gen)
        ok = lemma5_holds(Z, sig, lam, delta)
    elif kind == "lemma14":
        ok = lemma14_holds(*lemma14_sequences(generator, trials, T, gen), delta)
    else:
        raise ConfigurationError(f"unknown inequality {kind!r}")
    return ConcentrationResult(kind, generator, trials, int((~ok).sum()), delta)
