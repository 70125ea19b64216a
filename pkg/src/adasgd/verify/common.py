from __future__ import annotations

import math
from dataclasses import replace

from ..errors import ConfigurationError
from ..oracles import NoiseParams, Oracle, SubGaussianAffine, Truncated, TwoPointAdversarial
from ..optimizer import KnownParamConfig

# trials per chunk are sized so one chunk holds about this many recorded scalars per field
CHUNK_BUDGET = 1_000_000


def binomial_margin(delta: float, trials: int) -> float:
    """Three-sigma band 3 sqrt(delta (1 - delta) / n)."""
    return 3.0 * math.sqrt(delta * (1 - delta) / trials)


def chunks(n: int, T: int):
    size = max(1, min(n, CHUNK_BUDGET // (T + 1)))
    return [(a, min(n, a + size)) for a in range(0, n, size)]


def at_horizon(obj, T: int):
    """Copy of an oracle/config whose horizon parameter is set to T (recursing into wrappers)."""
    if isinstance(obj, Truncated):
        return replace(obj, horizon=T)
    if isinstance(obj, TwoPointAdversarial):
        return replace(obj, horizon=T)
    if isinstance(obj, KnownParamConfig):
        return replace(obj, horizon=T)
    return obj


def analysis_noise(oracle: Oracle, T: int, delta: float) -> NoiseParams:
    """Affine noise levels to plug into the bounded-noise formulas.

    Sub-Gaussian oracles are analysed through their truncated counterpart, whose
    levels are inflated by 3 sqrt(ln(4T/delta)).
    """
    if isinstance(oracle, SubGaussianAffine):
        return oracle.truncated_params(T, delta)
    return oracle.bound_params()


def tuned_config(problem, oracle: Oracle, T: int, delta: float, alpha: float) -> KnownParamConfig:
    noise = analysis_noise(oracle, T, delta)
    return KnownParamConfig(problem.beta, noise.sigma0, noise.sigma1, delta, T, alpha)


def check_tuned(config: KnownParamConfig, problem, noise: NoiseParams, T: int, delta: float) -> None:
    if (config.beta, config.sigma0, config.sigma1, config.horizon, config.delta) != (
        problem.beta, noise.sigma0, noise.sigma1, T, delta
    ):
        raise ConfigurationError("tuned-stepsize parameters do not match the problem, oracle and horizon")
