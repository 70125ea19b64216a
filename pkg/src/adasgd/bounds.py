"""Closed-form bound constants and rate right-hand sides.

``log`` is base 2 throughout; ``ln`` (natural) appears only in the
truncation radius and the sub-Gaussian inflation factor sqrt(ln(4T/delta)).
Where a theorem hides constants inside O(.), the explicit constants are the
ones in the final display of its proof:

* non-convex rate: sum ||grad||^2 <= 2 gamma Delta1/eta + 4(1+s1^2) C2^2
  + 6(s0^2 + 2 beta s1^2 F) log(1/delta) + C2 s0 sqrt(8T),  C2 = 2F/eta + eta beta
* convex rate: sum grad.(w - w*) <= 8 beta (1+s1^2)(D^2/eta + eta)^2
  + ((D^2/eta + eta) sqrt(8) + 4 D sqrt(log(1/delta))) s0 sqrt(T)
  + gamma d1^2/eta + 12 beta s1^2 D^2 log(1/delta),
  divided by T (Jensen) to bound f(avg iterate) - f*.

The variance proxy in the distance bound is sigma^2 = sigma0^2 + 2 beta sigma1^2 F.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import InvalidInput

log2 = math.log2

# failure-probability ranges of each theorem's statement
THEOREM_DELTA = {"thm1": (0.0, 1 / 3), "thm2": (0.0, 1 / 4), "thm5": (0.0, 1 / 2)}


@dataclass(frozen=True)
class BoundInputs:
    beta: float
    sigma0: float
    sigma1: float
    eta: float
    gamma: float
    T: int
    delta: float
    delta1: float = 0.0
    d1: float = 0.0
    alpha: float | None = None

    def __post_init__(self):
        for name in ("beta", "sigma0", "sigma1", "eta", "gamma", "delta1", "d1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInput(f"{name} must be finite and non-negative, got {v}")
        if self.T < 1:
            raise InvalidInput("T must be at least 1")
        if not 0 < self.delta < 1:
            raise InvalidInput("delta must lie in (0, 1)")
        if self.alpha is not None and not self.alpha > 0:
            raise InvalidInput("alpha must be positive")

    def with_noise(self, sigma0: float, sigma1: float) -> "BoundInputs":
        return replace(self, sigma0=sigma0, sigma1=sigma1)


def check_theorem_delta(theorem: str, delta: float) -> None:
    lo, hi = THEOREM_DELTA[theorem]
    if not lo < delta < hi:
        raise InvalidInput(f"{theorem} requires delta in ({lo:g}, {hi:.4g}), got {delta}")


def _need_gamma(p: BoundInputs) -> None:
    if p.gamma <= 0:
        raise InvalidInput("gamma must be positive")


def c1(p: BoundInputs) -> float:
    """Bound on sum_t ||g_t||^2 / G_t^2 for AdaSGD."""
    _need_gamma(p)
    T = p.T
    num = 2 * p.sigma0**2 * T + 8 * (1 + p.sigma1**2) * (p.eta**2 * p.beta**2 * T**3 + p.beta * p.delta1 * T)
    return log2(1 + num / p.gamma**2)


def f_bound(p: BoundInputs, c1_value: float | None = None) -> float:
    """Uniform high-probability bound F on f(w_t) - f*, t <= T+1."""
    c = c1(p) if c1_value is None else c1_value
    lg = log2(p.T / p.delta)
    return (
        2 * p.delta1
        + (3 * lg + 4 * c) * p.eta * p.sigma0
        + (9 * lg**2 + 16 * c**2) * p.eta**2 * p.beta * p.sigma1**2
        + p.eta**2 * p.beta * c
    )


def subgaussian_factor(T: int, delta: float) -> float:
    """Noise inflation 3 sqrt(ln(4T/delta)) of the truncated oracle."""
    return 3.0 * math.sqrt(math.log(4 * T / delta))


def _inflated(p: BoundInputs) -> BoundInputs:
    k = subgaussian_factor(p.T, p.delta)
    return p.with_noise(k * p.sigma0, k * p.sigma1)


def c1_subgaussian(p: BoundInputs) -> float:
    return c1(_inflated(p))


def f_bound_subgaussian(p: BoundInputs, c1_value: float | None = None) -> float:
    """F for sub-Gaussian affine noise: the bounded-noise F at the inflated noise levels."""
    q = _inflated(p)
    return f_bound(q, c1(q) if c1_value is None else c1_value)


def c2(p: BoundInputs, F: float | None = None) -> float:
    F = f_bound(p) if F is None else F
    return 2 * F / p.eta + p.eta * p.beta


def nonconvex_rate_rhs(p: BoundInputs, F: float | None = None) -> float:
    """Explicit bound on (1/T) sum_{t<=T} ||grad f(w_t)||^2."""
    _need_gamma(p)
    F = f_bound(p) if F is None else F
    C2 = c2(p, F)
    T = p.T
    inv = (
        2 * p.gamma * p.delta1 / p.eta
        + 4 * (1 + p.sigma1**2) * C2**2
        + 6 * (p.sigma0**2 + 2 * p.beta * p.sigma1**2 * F) * log2(1 / p.delta)
    )
    return inv / T + C2 * p.sigma0 * math.sqrt(8) / math.sqrt(T)


def nonconvex_rate_terms(p: BoundInputs) -> tuple[float, float]:
    """(1/T part, sigma0/sqrt(T) part) of ``nonconvex_rate_rhs``."""
    F = f_bound(p)
    total = nonconvex_rate_rhs(p, F)
    sqrt_part = c2(p, F) * p.sigma0 * math.sqrt(8) / math.sqrt(p.T)
    return total - sqrt_part, sqrt_part


def variance_proxy(p: BoundInputs, F: float | None = None) -> float:
    F = f_bound(p) if F is None else F
    return p.sigma0**2 + 2 * p.beta * p.sigma1**2 * F


def lemma13_c(p: BoundInputs, F: float | None = None) -> float:
    s2 = variance_proxy(p, F)
    return 2 * log2(1 + s2 * p.T / (2 * p.gamma**2)) + 7 * s2 * log2(p.T / p.delta) / p.gamma**2


def lemma13_ab(T: int, delta: float) -> tuple[float, float]:
    inner = log2(60 * log2(6 * T) ** 2 / delta)
    return 512 * inner, 512 * inner**2


def d_bound_sq(p: BoundInputs) -> float:
    """D^2, the uniform high-probability bound on ||w_t - w*||^2, t <= T+1."""
    _need_gamma(p)
    F = f_bound(p)
    C = lemma13_c(p, F)
    A, B = lemma13_ab(p.T, p.delta)
    return 2 * p.d1**2 + p.eta**2 * (
        0.5 + 2 * c1(p) + 8 * C**2 + A * C + B * (p.sigma0 / p.gamma + p.sigma1) ** 2
    )


def convex_rate_rhs(p: BoundInputs, D_sq: float | None = None) -> float:
    """Explicit bound on f((1/T) sum w_t) - f* for convex objectives."""
    D2 = d_bound_sq(p) if D_sq is None else D_sq
    D = math.sqrt(D2)
    T = p.T
    lg = log2(1 / p.delta)
    k = D2 / p.eta + p.eta
    inv = 8 * p.beta * (1 + p.sigma1**2) * k**2 + p.gamma * p.d1**2 / p.eta + 12 * p.beta * p.sigma1**2 * D2 * lg
    return inv / T + (k * math.sqrt(8) + 4 * D * math.sqrt(lg)) * p.sigma0 / math.sqrt(T)


def _alpha(p: BoundInputs) -> float:
    if p.alpha is None:
        raise InvalidInput("alpha is required for the known-parameter bounds")
    return p.alpha


def known_f_bound(p: BoundInputs) -> float:
    """F for SGD with the tuned stepsize.

    With beta = 0 and sigma0 > 0 the first branch of the min is undefined; the
    second branch is used.
    """
    a = _alpha(p)
    lg = log2(p.T / p.delta)
    if p.sigma0 == 0:
        noise = 0.0
    else:
        second = p.sigma0 * a / math.sqrt(p.T)
        noise = second if p.beta == 0 else min(p.sigma0**2 / (4 * p.beta * (1 + p.sigma1**2 * lg)), second)
    return 2 * p.delta1 + 2 * p.beta * a**2 + 3 * noise * lg


def known_rate_rhs(p: BoundInputs) -> float:
    """Bound on (1/T) sum ||grad f(w_t)||^2 for SGD with the tuned stepsize."""
    a = _alpha(p)
    T = p.T
    sqrt_part = (p.beta * a + p.delta1 / a) * 2 * p.sigma0 / math.sqrt(T)
    inv = (
        8 * p.beta * p.delta1 * (1 + 4 * p.sigma1**2) * log2(T / p.delta)
        + 24 * p.sigma1**2 * p.beta**2 * a**2 * log2(1 / p.delta)
        + 15 * p.sigma0**2 * log2(1 / p.delta)
    )
    return sqrt_part + inv / T


def lemma14_ab(t, delta: float):
    """A_t(delta), B_t(delta) of the anytime empirical-Bernstein bound (vectorized in t)."""
    inner = np.log2(60 * np.log2(6 * np.asarray(t, dtype=np.float64)) / delta)
    return 16 * inner, 16 * inner**2


@dataclass(frozen=True)
class BoundReport:
    c1: float
    f_bound: float
    d_bound_sq: float
    nonconvex_rate_rhs: float
    convex_rate_rhs: float
    c2: float
    lemma13_c: float
    regime: str
    known_f_bound: float | None = None
    known_rate_rhs: float | None = None
    subgaussian: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def report(p: BoundInputs, subgaussian: bool = False) -> BoundReport:
    """Evaluate every constant; with ``subgaussian`` the inflated noise levels are used."""
    q = _inflated(p) if subgaussian else p
    F = f_bound(q)
    inv, sq = nonconvex_rate_terms(q)
    known = p.alpha is not None
    return BoundReport(
        c1=c1(q),
        f_bound=F,
        d_bound_sq=d_bound_sq(q),
        nonconvex_rate_rhs=inv + sq,
        convex_rate_rhs=convex_rate_rhs(q),
        c2=c2(q, F),
        lemma13_c=lemma13_c(q, F),
        regime="low-noise" if inv >= sq else "high-noise",
        known_f_bound=known_f_bound(q) if known else None,
        known_rate_rhs=known_rate_rhs(q) if known else None,
        subgaussian=subgaussian,
    )
