"""Stochastic gradient oracles for the affine-variance noise model.

An oracle is immutable configuration. Randomness is consumed in two phases so
that batched runs stay reproducible per trial: ``draws(gen, steps, dim)``
pre-draws the scale-free randomness a trial needs for ``steps`` queries (one
call per trial stream), and ``perturb(grad, draws)`` turns one row of it into
a stochastic gradient at the current true gradient. Both are vectorized over
leading batch axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InvalidInput, OracleMisconfiguration, UnsupportedQuery
from .rng import as_generator

RETRY_CAP = 10**6


@dataclass(frozen=True)
class NoiseParams:
    sigma0: float = 0.0
    sigma1: float = 0.0

    def __post_init__(self):
        for name in ("sigma0", "sigma1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInput(f"{name} must be finite and non-negative, got {v}")

    def scale(self, grad_norm_sq):
        """sqrt(sigma0^2 + sigma1^2 ||grad||^2)."""
        return np.sqrt(self.sigma0**2 + self.sigma1**2 * grad_norm_sq)


def _sq_norm(x):
    return np.sum(x * x, axis=-1)


class Oracle:
    """Common interface; concrete oracles below."""

    bounded = True

    def width(self, dim: int) -> int:
        raise NotImplementedError

    def draws(self, gen: np.random.Generator, steps: int, dim: int) -> np.ndarray:
        raise NotImplementedError

    def perturb(self, grad, draws) -> np.ndarray:
        raise NotImplementedError

    def noise_bound(self, grad) -> np.ndarray:
        raise NotImplementedError

    def bound_params(self) -> NoiseParams:
        """(sigma0, sigma1) of the almost-sure affine bound this oracle satisfies."""
        raise NotImplementedError

    def check_dimension(self, dim: int) -> None:
        pass


@dataclass(frozen=True)
class Exact(Oracle):
    def width(self, dim):
        return 0

    def draws(self, gen, steps, dim):
        return np.empty((steps, 0))

    def perturb(self, grad, draws):
        return np.array(grad, dtype=np.float64, copy=True)

    def noise_bound(self, grad):
        return np.zeros(np.shape(grad)[:-1])

    def bound_params(self):
        return NoiseParams(0.0, 0.0)


@dataclass(frozen=True)
class BoundedAffine(Oracle):
    """g = grad + U * s * v with v uniform on the sphere, U ~ U[0, 1), s = affine scale."""

    sigma0: float = 0.0
    sigma1: float = 0.0

    def __post_init__(self):
        NoiseParams(self.sigma0, self.sigma1)

    @property
    def params(self) -> NoiseParams:
        return NoiseParams(self.sigma0, self.sigma1)

    def width(self, dim):
        return dim + 1

    def draws(self, gen, steps, dim):
        z = gen.standard_normal((steps, dim))
        u = gen.random((steps, 1))
        return np.concatenate([z, u], axis=1)

    def unit_noise(self, draws):
        z, u = draws[..., :-1], draws[..., -1:]
        norm = np.sqrt(_sq_norm(z))[..., None]
        # a zero normal vector has probability zero; map it to zero noise
        v = np.divide(z, norm, out=np.zeros_like(z), where=norm > 0)
        return u * v

    def perturb(self, grad, draws):
        s = self.params.scale(_sq_norm(grad))[..., None]
        return grad + s * self.unit_noise(draws)

    def noise_bound(self, grad):
        return self.params.scale(_sq_norm(grad))

    def bound_params(self):
        return self.params


@dataclass(frozen=True)
class SubGaussianAffine(Oracle):
    """Isotropic Gaussian noise, per-coordinate std s / sqrt(2d).

    For d = 1 this gives P(|X| >= t) = 2 Phi(-t sqrt(2) / s) <= 2 exp(-t^2 / s^2);
    for d > 1 the tail inequality is checked empirically by the test suite.
    """

    sigma0: float = 0.0
    sigma1: float = 0.0
    bounded = False

    def __post_init__(self):
        NoiseParams(self.sigma0, self.sigma1)

    @property
    def params(self) -> NoiseParams:
        return NoiseParams(self.sigma0, self.sigma1)

    def width(self, dim):
        return dim

    def draws(self, gen, steps, dim):
        return gen.standard_normal((steps, dim))

    def unit_noise(self, draws):
        return draws / math.sqrt(2 * draws.shape[-1])

    def perturb(self, grad, draws):
        s = self.params.scale(_sq_norm(grad))[..., None]
        return grad + s * self.unit_noise(draws)

    def noise_bound(self, grad):
        raise UnsupportedQuery("sub-Gaussian noise has no almost-sure bound")

    def bound_params(self):
        raise UnsupportedQuery("sub-Gaussian noise has no almost-sure bound; use a Truncated wrapper")

    def truncated_params(self, horizon: int, delta_prime: float) -> NoiseParams:
        """Bounded-affine parameters of the truncated oracle: 3 sigma sqrt(ln(4T/delta'))."""
        k = 3.0 * math.sqrt(math.log(4.0 * horizon / delta_prime))
        return NoiseParams(k * self.sigma0, k * self.sigma1)


@dataclass(frozen=True)
class Truncated(Oracle):
    """Bounded oracle obtained from a symmetric sub-Gaussian oracle by rejection + bias correction.

    Each query is truncated at per-query failure probability delta = delta_prime / horizon.
    The correction branch returns -((2 - delta)/delta) E[Z], which is the zero vector for the
    symmetric inner noise supported here.
    """

    inner: Oracle
    delta_prime: float
    horizon: int

    def __post_init__(self):
        if not 0 < self.delta_prime < 1:
            raise ConfigurationError("delta_prime must lie in (0, 1)")
        if self.horizon < 2:
            raise ConfigurationError("horizon must be at least 2")
        if not isinstance(self.inner, (SubGaussianAffine, BoundedAffine)):
            raise ConfigurationError("truncation needs symmetric inner noise (sub-Gaussian or bounded affine)")

    @property
    def delta(self) -> float:
        return self.delta_prime / self.horizon

    @property
    def unit_radius(self) -> float:
        """Acceptance radius r / s = sqrt(ln(4/delta))."""
        return math.sqrt(math.log(4.0 / self.delta))

    def width(self, dim):
        # inner draws, correction coin, "output differs from first inner draw" flag
        return self.inner.width(dim) + 2

    def draws(self, gen, steps, dim):
        inner = self.inner.draws(gen, steps, dim)
        radius = self.unit_radius
        unit = self.inner.unit_noise(inner)
        rejected = np.flatnonzero(np.sqrt(_sq_norm(unit)) > radius)
        for i in rejected:
            for _ in range(RETRY_CAP):
                row = self.inner.draws(gen, 1, dim)[0]
                if math.sqrt(_sq_norm(self.inner.unit_noise(row))) <= radius:
                    inner[i] = row
                    break
            else:
                raise OracleMisconfiguration(f"rejection sampling exceeded {RETRY_CAP} retries")
        coin = gen.random((steps, 1))
        changed = np.zeros((steps, 1))
        changed[rejected] = 1.0
        changed[coin[:, 0] < self.delta / 2] = 1.0
        return np.concatenate([inner, coin, changed], axis=1)

    def perturb(self, grad, draws):
        inner, coin = draws[..., :-2], draws[..., -2:-1]
        s = self.inner.params.scale(_sq_norm(grad))[..., None]
        keep = coin >= self.delta / 2
        return grad + np.where(keep, s * self.inner.unit_noise(inner), 0.0)

    def noise_bound(self, grad):
        return 3.0 * self.unit_radius * self.inner.params.scale(_sq_norm(grad))

    def bound_params(self):
        k = 3.0 * self.unit_radius
        p = self.inner.params
        return NoiseParams(k * p.sigma0, k * p.sigma1)


@dataclass(frozen=True)
class TwoPointAdversarial(Oracle):
    """One-dimensional oracle: grad + sigma w.p. 1/T, grad - sigma/(T-1) otherwise.

    ``force_low`` pins every draw to the low branch, which realizes the
    all-negative-noise conditioning event of the lower-bound construction.
    """

    sigma: float
    horizon: int
    force_low: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigurationError("sigma must be finite and non-negative")
        if self.horizon < 2:
            raise ConfigurationError("horizon must be at least 2")

    def check_dimension(self, dim):
        if dim != 1:
            raise ConfigurationError(f"two-point oracle is one-dimensional, problem has dimension {dim}")

    def width(self, dim):
        return 1

    def draws(self, gen, steps, dim):
        self.check_dimension(dim)
        return gen.random((steps, 1))

    def perturb(self, grad, draws):
        self.check_dimension(np.shape(grad)[-1])
        high = (draws < 1.0 / self.horizon) & (not self.force_low)
        return grad + np.where(high, self.sigma, -self.sigma / (self.horizon - 1))

    def noise_bound(self, grad):
        return np.full(np.shape(grad)[:-1], self.sigma * max(1.0, 1.0 / (self.horizon - 1)))

    def bound_params(self):
        return NoiseParams(self.sigma, 0.0)


def sample(oracle: Oracle, problem, w, rng) -> np.ndarray:
    """One stochastic gradient at ``w``."""
    w = np.asarray(w, dtype=np.float64)
    oracle.check_dimension(problem.dimension)
    d = oracle.draws(as_generator(rng), 1, problem.dimension)[0]
    return oracle.perturb(problem.gradient(w), d)


def noise_bound(oracle: Oracle, problem, w) -> float:
    out = oracle.noise_bound(problem.gradient(w))
    return float(out) if np.ndim(out) == 0 else out


def truncation_radius(sigma: float, delta: float) -> float:
    return sigma * math.sqrt(math.log(4.0 / delta))


def truncate_sample(
    inner_sample,
    true_grad,
    sigma: float,
    delta: float,
    rng,
    resampler: Callable[[], np.ndarray],
    mean_z=None,
) -> np.ndarray:
    """Bounded, zero-mean replacement of a sub-Gaussian stochastic gradient.

    The inner noise is rejection-sampled onto the ball of radius
    ``sigma * sqrt(ln(4/delta))`` (``resampler`` returns a fresh inner sample);
    with probability ``delta/2`` the output noise is instead the bias
    correction ``-((2-delta)/delta) * mean_z``. ``mean_z`` is the mean of the
    accepted noise and defaults to zero, which is exact for symmetric noise.
    """
    if not 0 < delta < 1:
        raise InvalidInput("delta must lie in (0, 1)")
    if not sigma > 0:
        raise InvalidInput("sigma must be positive")
    gen = as_generator(rng)
    true_grad = np.asarray(true_grad, dtype=np.float64)
    r = truncation_radius(sigma, delta)
    x = np.asarray(inner_sample, dtype=np.float64) - true_grad
    tries = 0
    while math.sqrt(_sq_norm(x)) > r:
        tries += 1
        if tries > RETRY_CAP:
            raise OracleMisconfiguration(f"rejection sampling exceeded {RETRY_CAP} retries")
        x = np.asarray(resampler(), dtype=np.float64) - true_grad
    if gen.random() < delta / 2:
        ez = np.zeros_like(true_grad) if mean_z is None else np.asarray(mean_z, dtype=np.float64)
        return true_grad - (2.0 - delta) / delta * ez
    return true_grad + x
