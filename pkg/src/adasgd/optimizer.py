"""AdaGrad-Norm SGD, tuned constant-stepsize SGD, and trajectory recording.

AdaSGD update::

    G_t^2 = gamma^2 + sum_{s<=t} ||g_s||^2,   eta_t = eta / G_t,   w_{t+1} = w_t - eta_t g_t

The current gradient enters its own stepsize. ``run_batch`` advances many
independent trials in lock-step; trial ``i`` consumes only its own stream, so
its trajectory does not depend on which other trials share the batch.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import ContractViolation, InvalidInput, NumericFailure
from .oracles import NoiseParams, Oracle
from .rng import as_generator

CSV_COLUMNS = ("t", "f_gap", "grad_norm_sq", "dist_sq", "eta_t", "g_sq_accum", "noise_norm_sq")


@dataclass(frozen=True)
class AdaSgdConfig:
    eta: float
    gamma: float

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise InvalidInput("eta must be positive")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise InvalidInput("gamma must be positive")


@dataclass(frozen=True)
class KnownParamConfig:
    """Parameters of SGD with the tuned constant stepsize (beta, noise and horizon known)."""

    beta: float
    sigma0: float
    sigma1: float
    delta: float
    horizon: int
    alpha: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidInput("beta must be positive")
        if not 0 < self.delta < 0.5:
            raise InvalidInput("delta must lie in (0, 1/2)")
        if self.horizon < 1:
            raise InvalidInput("horizon must be positive")
        if not self.alpha > 0:
            raise InvalidInput("alpha must be positive")
        NoiseParams(self.sigma0, self.sigma1)

    @property
    def stepsize(self) -> float:
        return known_stepsize(self)


AlgorithmConfig = Union[AdaSgdConfig, KnownParamConfig]


def known_stepsize(config: KnownParamConfig) -> float:
    """min{1 / (4 beta (1 + sigma1^2 log2(T/delta))), alpha / (sigma0 sqrt(T))}."""
    lg = math.log2(config.horizon / config.delta)
    first = 1.0 / (4.0 * config.beta * (1.0 + config.sigma1**2 * lg))
    if config.sigma0 == 0:
        return first
    return min(first, config.alpha / (config.sigma0 * math.sqrt(config.horizon)))


@dataclass(frozen=True)
class OptimizerState:
    w: np.ndarray
    g_sq_accum: float
    t: int = 1
    eta_t: float = float("nan")

    @classmethod
    def initial(cls, w1, config: AdaSgdConfig) -> "OptimizerState":
        w = np.array(w1, dtype=np.float64)
        return cls(w, config.gamma**2, 1, config.eta / config.gamma)


def ada_step(state: OptimizerState, g, config: AdaSgdConfig) -> OptimizerState:
    g = np.asarray(g, dtype=np.float64)
    if g.shape != state.w.shape:
        raise ContractViolation(f"gradient shape {g.shape} != iterate shape {state.w.shape}")
    if not np.all(np.isfinite(g)):
        raise NumericFailure(state.t)
    accum = state.g_sq_accum + float(np.dot(g, g))
    eta_t = config.eta / math.sqrt(accum)
    return OptimizerState(state.w - eta_t * g, accum, state.t + 1, eta_t)


@dataclass
class Trajectory:
    """Per-step scalars for t = 1..T+1 along the last axis (leading axis = trial, if batched).

    Entries that only exist for t <= T (stepsize, accumulator, noise, products
    with g_t) are NaN at t = T+1.
    """

    f_gap: np.ndarray
    grad_norm_sq: np.ndarray
    dist_sq: np.ndarray
    eta_t: np.ndarray
    g_sq_accum: np.ndarray
    noise_norm_sq: np.ndarray
    g_norm_sq: np.ndarray
    grad_dot_g: np.ndarray
    g_dot_dev: np.ndarray
    avg_gap: np.ndarray
    avg_iterate: np.ndarray
    eta: float
    gamma: float
    adaptive: bool = True
    iterates: np.ndarray | None = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return self.f_gap.shape[-1] - 1

    @property
    def batched(self) -> bool:
        return self.f_gap.ndim == 2

    @property
    def max_f_gap(self) -> np.ndarray:
        """Running maximum of the optimality gap over s <= t."""
        return np.maximum.accumulate(self.f_gap, axis=-1)

    @property
    def max_dist(self) -> np.ndarray:
        return np.sqrt(np.maximum.accumulate(self.dist_sq, axis=-1))

    def trial(self, i: int) -> "Trajectory":
        if not self.batched:
            raise IndexError("trajectory is not batched")
        fields = {k: getattr(self, k)[i] for k in _ARRAY_FIELDS}
        it = None if self.iterates is None else self.iterates[i]
        return replace(self, **fields, iterates=it)

    def to_csv(self, path) -> None:
        if self.batched:
            raise ValueError("write one trial at a time")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            cols = [self.f_gap, self.grad_norm_sq, self.dist_sq, self.eta_t, self.g_sq_accum, self.noise_norm_sq]
            for k in range(self.T + 1):
                writer.writerow([k + 1] + [_fmt(c[k]) for c in cols])


_ARRAY_FIELDS = (
    "f_gap", "grad_norm_sq", "dist_sq", "eta_t", "g_sq_accum", "noise_norm_sq",
    "g_norm_sq", "grad_dot_g", "g_dot_dev", "avg_gap", "avg_iterate",
)


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected trajectory columns {header}")
        rows = [[float(v) if v != "" else np.nan for v in r] for r in reader]
    data = np.array(rows)
    return {name: data[:, j] for j, name in enumerate(CSV_COLUMNS)}


def run_batch(
    problem,
    oracle: Oracle,
    config: AlgorithmConfig,
    T: int,
    rngs: Sequence,
    w1=None,
    keep_iterates: bool = False,
) -> Trajectory:
    """Run ``len(rngs)`` independent trials for ``T`` steps from a common ``w1``."""
    if T < 1:
        raise InvalidInput("T must be at least 1")
    d = problem.dimension
    oracle.check_dimension(d)
    n = len(rngs)
    w1 = np.zeros(d) if w1 is None else np.asarray(w1, dtype=np.float64).ravel()
    if w1.shape != (d,):
        raise ContractViolation(f"w1 has shape {w1.shape}, problem dimension is {d}")
    # (T, n, k): step slices are contiguous
    draws = np.stack([oracle.draws(as_generator(r), T, d) for r in rngs], axis=1)

    adaptive = isinstance(config, AdaSgdConfig)
    if adaptive:
        eta, gamma = config.eta, config.gamma
    else:
        eta, gamma = known_stepsize(config), 0.0

    shape = (n, T + 1)
    rec = {k: np.full(shape, np.nan) for k in _ARRAY_FIELDS if k not in ("avg_gap", "avg_iterate")}
    iterates = np.empty((n, T + 1, d)) if keep_iterates else None
    minimizer = problem.minimizer

    W = np.tile(w1, (n, 1))
    wsum = np.zeros((n, d))
    accum = np.full(n, gamma**2)
    for k in range(T + 1):
        grad = problem.gradient(W)
        rec["f_gap"][:, k] = problem.value(W) - problem.f_star
        rec["grad_norm_sq"][:, k] = np.sum(grad * grad, axis=1)
        if minimizer is not None:
            dev = W - minimizer
            rec["dist_sq"][:, k] = np.sum(dev * dev, axis=1)
        if keep_iterates:
            iterates[:, k] = W
        if k == T:
            break
        g = oracle.perturb(grad, draws[k])
        if not np.all(np.isfinite(g)):
            raise NumericFailure(k + 1)
        gsq = np.sum(g * g, axis=1)
        noise = g - grad
        accum = accum + gsq
        step = eta / np.sqrt(accum) if adaptive else np.full(n, eta)
        rec["eta_t"][:, k] = step
        rec["g_sq_accum"][:, k] = accum
        rec["noise_norm_sq"][:, k] = np.sum(noise * noise, axis=1)
        rec["g_norm_sq"][:, k] = gsq
        rec["grad_dot_g"][:, k] = np.sum(grad * g, axis=1)
        if minimizer is not None:
            rec["g_dot_dev"][:, k] = np.sum(g * dev, axis=1)
        wsum += W
        W = W - step[:, None] * g
        if not np.all(np.isfinite(W)):
            raise NumericFailure(k + 1, "non-finite iterate")

    avg = wsum / T
    return Trajectory(
        **rec,
        avg_gap=np.asarray(problem.value(avg) - problem.f_star, dtype=np.float64).reshape(n),
        avg_iterate=avg,
        eta=eta,
        gamma=gamma,
        adaptive=adaptive,
        iterates=iterates,
    )


def run(problem, oracle: Oracle, config: AlgorithmConfig, T: int, rng, w1=None, keep_iterates: bool = False) -> Trajectory:
    """Single trajectory; identical to trial 0 of ``run_batch`` with the same stream."""
    return run_batch(problem, oracle, config, T, [rng], w1, keep_iterates).trial(0)


def decorrelated_stepsizes(traj: Trajectory, noise: NoiseParams) -> tuple[np.ndarray, np.ndarray]:
    """Analysis stepsizes for t = 1..T.

    eta_tilde_t = eta / sqrt(G_{t-1}^2 + (1 + sigma1^2) ||grad f(w_t)||^2 + sigma0^2)
    eta_hat_t   = eta / sqrt(G_{t-1}^2 + ||grad f(w_t)||^2)
    """
    if not traj.adaptive:
        raise ValueError("decorrelated stepsizes are defined for AdaSGD trajectories")
    accum = traj.g_sq_accum[..., :-1]
    prev = np.concatenate([np.full(accum.shape[:-1] + (1,), traj.gamma**2), accum[..., :-1]], axis=-1)
    gn = traj.grad_norm_sq[..., :-1]
    tilde = traj.eta / np.sqrt(prev + (1.0 + noise.sigma1**2) * gn + noise.sigma0**2)
    hat = traj.eta / np.sqrt(prev + gn)
    return tilde, hat
