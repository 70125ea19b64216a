"""Deterministic inequality checks on recorded trajectories.

Each check holds for every realization of a bounded-noise run, so a failure is
an implementation bug rather than bad luck. Checks are vectorized: trajectories
may carry a leading trial axis, and comparisons are made at every prefix t.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import BoundInputs, c1
from ..oracles import NoiseParams
from ..optimizer import Trajectory, decorrelated_stepsizes

REL_SLACK = 1e-9
# absolute floor at the normal/subnormal boundary; converged runs reach exact underflow
ABS_FLOOR = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    min_slack: float  # min over checked entries of rhs - lhs
    checked: int
    violations: int = 0

    def __bool__(self) -> bool:
        return self.passed


def compare(name: str, lhs, rhs) -> LemmaCheck:
    """lhs <= rhs entrywise, up to REL_SLACK relative to the larger magnitude (plus ABS_FLOOR)."""
    lhs, rhs = np.broadcast_arrays(np.asarray(lhs, dtype=np.float64), np.asarray(rhs, dtype=np.float64))
    if lhs.size == 0:
        return LemmaCheck(name, True, 0.0, 0)
    tol = REL_SLACK * np.maximum(np.abs(lhs), np.abs(rhs)) + ABS_FLOOR
    bad = ~(lhs <= rhs + tol)  # NaN counts as a violation
    return LemmaCheck(name, not bad.any(), float(np.min(rhs - lhs)), int(lhs.size), int(bad.sum()))


def check_lemma4(g_norm_sq, G0: float) -> tuple[LemmaCheck, LemmaCheck]:
    """sum ||g||^2/G_t <= 2 sqrt(sum ||g||^2) and sum ||g||^2/G_t^2 <= 2 log(G_t/G_0), every prefix."""
    if not G0 > 0:
        raise ValueError("G0 must be positive")
    x = np.asarray(g_norm_sq, dtype=np.float64)
    S = np.cumsum(x, axis=-1)
    G2 = G0**2 + S
    first = compare("lemma4_sqrt", np.cumsum(x / np.sqrt(G2), axis=-1), 2 * np.sqrt(S))
    second = compare("lemma4_log", np.cumsum(x / G2, axis=-1), np.log1p(S / G0**2) / np.log(2.0))
    if x.shape[-1] == 0:
        first = compare("lemma4_sqrt", 0.0, 0.0)
        second = compare("lemma4_log", 0.0, 0.0)
    return first, second


def _steps(traj: Trajectory, name: str) -> np.ndarray:
    return getattr(traj, name)[..., :-1]


def ratio_sum(traj: Trajectory) -> np.ndarray:
    """Prefix sums of ||g_t||^2 / G_t^2."""
    return np.cumsum(_steps(traj, "g_norm_sq") / _steps(traj, "g_sq_accum"), axis=-1)


def check_lemma1(traj: Trajectory, beta: float) -> LemmaCheck:
    """Non-convex regret: sum grad.g <= gamma Delta1/eta + (2 max Delta/eta + eta beta) sqrt(sum ||g||^2)."""
    eta, gamma = traj.eta, traj.gamma
    lhs = np.cumsum(_steps(traj, "grad_dot_g"), axis=-1)
    dbar = traj.max_f_gap[..., :-1]
    root = np.sqrt(np.cumsum(_steps(traj, "g_norm_sq"), axis=-1))
    rhs = gamma * traj.f_gap[..., :1] / eta + (2 * dbar / eta + eta * beta) * root
    return compare("lemma1_regret", lhs, rhs)


def check_lemma12(traj: Trajectory) -> LemmaCheck:
    """Convex-style regret: sum g.(w - w*) <= (dbar^2/eta + eta) sqrt(sum ||g||^2) + gamma d1^2 / (2 eta)."""
    eta, gamma = traj.eta, traj.gamma
    lhs = np.cumsum(_steps(traj, "g_dot_dev"), axis=-1)
    dbar_sq = np.maximum.accumulate(traj.dist_sq, axis=-1)[..., :-1]
    root = np.sqrt(np.cumsum(_steps(traj, "g_norm_sq"), axis=-1))
    rhs = (dbar_sq / eta + eta) * root + gamma * traj.dist_sq[..., :1] / (2 * eta)
    return compare("lemma12_regret", lhs, rhs)


def check_lemma6(traj: Trajectory, inputs: BoundInputs) -> LemmaCheck:
    """sum_{t<=T} ||g_t||^2 / G_t^2 <= C1."""
    return compare("lemma6_c1", ratio_sum(traj)[..., -1], c1(inputs))


def check_lemma7(traj: Trajectory, noise: NoiseParams, beta: float) -> tuple[LemmaCheck, LemmaCheck]:
    """Decorrelated-stepsize gap: pointwise bound and its summed form at every prefix."""
    tilde, _ = decorrelated_stepsizes(traj, noise)
    eta_t = _steps(traj, "eta_t")
    gn = _steps(traj, "grad_norm_sq")
    G = np.sqrt(_steps(traj, "g_sq_accum"))
    scale = np.sqrt(noise.sigma0**2 + noise.sigma1**2 * gn)
    diff = np.abs(tilde - eta_t)
    pointwise = compare("lemma7_pointwise", diff, 2 * tilde * scale / G)

    lhs = np.cumsum(diff * _steps(traj, "grad_dot_g"), axis=-1)
    S = ratio_sum(traj)
    dbar = traj.max_f_gap[..., :-1]
    eta = traj.eta
    rhs = (
        dbar / 4
        + 0.5 * np.cumsum(tilde * gn, axis=-1)
        + 2 * eta * noise.sigma0 * S
        + 8 * eta**2 * beta * noise.sigma1**2 * S**2
    )
    return pointwise, compare("lemma7_prefix", lhs, rhs)


def check_lemma8(problem, points) -> LemmaCheck:
    """||grad f(w)||^2 <= 2 beta (f(w) - f*) at every point (rows of ``points``)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    g = problem.gradient(pts)
    return compare("lemma8_smooth", np.sum(g * g, axis=-1), 2 * problem.beta * problem.gap(pts))


def check_accumulator(traj: Trajectory) -> LemmaCheck:
    """G_t^2 - G_{t-1}^2 = ||g_t||^2 up to 1e-12 relative to G_t^2."""
    acc = _steps(traj, "g_sq_accum")
    prev = np.concatenate([np.full(acc.shape[:-1] + (1,), traj.gamma**2), acc[..., :-1]], axis=-1)
    err = np.abs((acc - prev) - _steps(traj, "g_norm_sq"))
    return compare("accumulator", err, 1e-12 * acc)


def check_trajectory(traj: Trajectory, problem, noise: NoiseParams | None, delta: float = 0.5) -> list[LemmaCheck]:
    """All applicable checks. ``noise`` is the a.s. affine bound, or None for unbounded noise."""
    out = [*check_lemma4(_steps(traj, "g_norm_sq"), traj.gamma if traj.adaptive else 1.0)]
    if not traj.adaptive:
        return out + [compare("lemma8_smooth", traj.grad_norm_sq, 2 * problem.beta * traj.f_gap)]
    out.append(compare("lemma8_smooth", traj.grad_norm_sq, 2 * problem.beta * traj.f_gap))
    out.append(check_accumulator(traj))
    out.append(check_lemma1(traj, problem.beta))
    if problem.minimizer is not None:
        out.append(check_lemma12(traj))
    if noise is not None:
        inputs = BoundInputs(
            beta=problem.beta, sigma0=noise.sigma0, sigma1=noise.sigma1, eta=traj.eta,
            gamma=traj.gamma, T=traj.T, delta=delta, delta1=float(np.max(traj.f_gap[..., 0])),
        )
        out.append(check_lemma6(traj, inputs))
        out.extend(check_lemma7(traj, noise, problem.beta))
    return out

