"""Closed-form smooth test problems.

Every problem knows its smoothness constant, its minimum value and (where it
exists) a minimizer exactly, so bound constants never have to be estimated.
All evaluations accept a single point of shape ``(d,)`` or a batch of shape
``(n, d)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ContractViolation, InvalidInput

Array = NDArray[np.float64]

# f''(w) = 2 + 6 cos(2w) ranges over [-4, 8] for the separable sine problem.
SINE_AMPLITUDE = 3.0
SINE_BETA = 8.0


class ProblemKind(str, enum.Enum):
    QUADRATIC = "quadratic"
    LOWER_BOUND_QUAD = "lower_bound_quad"
    NONCONVEX_SINE = "nonconvex_sine"


@dataclass(frozen=True)
class SmoothProblem:
    kind: ProblemKind
    dimension: int
    beta: float
    f_star: float = 0.0
    minimizer: Array | None = None
    # quadratic only: f(w) = 1/2 (w-c)^T A (w-c) + f_star
    matrix: Array | None = field(default=None, repr=False)
    center: Array | None = None

    @property
    def convex(self) -> bool:
        return self.kind is not ProblemKind.NONCONVEX_SINE

    def _check(self, w) -> Array:
        w = np.asarray(w, dtype=np.float64)
        if w.ndim == 0 or w.shape[-1] != self.dimension:
            raise ContractViolation(
                f"point has shape {w.shape}, problem dimension is {self.dimension}"
            )
        if not np.all(np.isfinite(w)):
            raise ContractViolation("point has non-finite entries")
        return w

    def value(self, w) -> Array | float:
        w = self._check(w)
        if self.kind is ProblemKind.QUADRATIC:
            x = w - self.center
            out = 0.5 * np.sum((x @ self.matrix) * x, axis=-1) + self.f_star
        elif self.kind is ProblemKind.LOWER_BOUND_QUAD:
            out = 0.5 * self.beta * np.sum(w * w, axis=-1)
        else:
            out = np.sum(w * w + SINE_AMPLITUDE * np.sin(w) ** 2, axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def gradient(self, w) -> Array:
        w = self._check(w)
        if self.kind is ProblemKind.QUADRATIC:
            return (w - self.center) @ self.matrix
        if self.kind is ProblemKind.LOWER_BOUND_QUAD:
            return self.beta * w
        return 2.0 * w + SINE_AMPLITUDE * np.sin(2.0 * w)

    def gap(self, w) -> Array | float:
        return self.value(w) - self.f_star

    def dist_sq(self, w) -> Array | float:
        """Squared distance to the minimizer (NaN when none is declared)."""
        w = self._check(w)
        if self.minimizer is None:
            out = np.full(w.shape[:-1], np.nan)
        else:
            out = np.sum((w - self.minimizer) ** 2, axis=-1)
        return float(out) if np.ndim(out) == 0 else out


def random_rotation(dim: int, seed: int) -> Array:
    """Haar-distributed orthogonal matrix from a seeded generator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def quadratic(eigenvalues, rotation_seed: int | None = None, center=None, f_star: float = 0.0) -> SmoothProblem:
    """Quadratic with Hessian ``Q diag(eigenvalues) Q^T``.

    ``Q`` is the identity when ``rotation_seed`` is None. beta is the largest
    eigenvalue, exactly.
    """
    eig = np.asarray(eigenvalues, dtype=np.float64).ravel()
    if eig.size == 0 or np.any(eig < 0) or not np.all(np.isfinite(eig)):
        raise InvalidInput("eigenvalues must be finite and non-negative")
    dim = eig.size
    if rotation_seed is None:
        a = np.diag(eig)
    else:
        q = random_rotation(dim, rotation_seed)
        a = (q * eig) @ q.T
        a = 0.5 * (a + a.T)
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=np.float64).ravel()
    if c.shape != (dim,):
        raise ContractViolation("center dimension does not match eigenvalues")
    return SmoothProblem(
        kind=ProblemKind.QUADRATIC,
        dimension=dim,
        beta=float(eig.max()),
        f_star=float(f_star),
        minimizer=c.copy(),
        matrix=a,
        center=c,
    )


def lower_bound_quad(beta: float) -> SmoothProblem:
    """The one-dimensional ``(beta/2) w^2`` used by the lower-bound construction."""
    if not beta > 0:
        raise InvalidInput("beta must be positive")
    return SmoothProblem(ProblemKind.LOWER_BOUND_QUAD, 1, float(beta), 0.0, np.zeros(1))


def nonconvex_sine(dim: int) -> SmoothProblem:
    """``sum_i w_i^2 + 3 sin^2(w_i)``: beta = 8, f* = 0 at the origin, non-convex."""
    if dim < 1:
        raise InvalidInput("dimension must be positive")
    return SmoothProblem(ProblemKind.NONCONVEX_SINE, dim, SINE_BETA, 0.0, np.zeros(dim))


def value(problem: SmoothProblem, w) -> Array | float:
    return problem.value(w)


def gradient(problem: SmoothProblem, w) -> Array:
    return problem.gradient(w)


def finite_diff_check(problem: SmoothProblem, w, h: float = 1e-5) -> float:
    """Max over coordinates of |central difference - analytic gradient|."""
    if not h > 0:
        raise InvalidInput("h must be positive")
    w = problem._check(w)
    if w.ndim != 1:
        raise ContractViolation("finite_diff_check takes a single point")
    basis = np.eye(problem.dimension) * h
    fd = (problem.value(w + basis) - problem.value(w - basis)) / (2.0 * h)
    return float(np.max(np.abs(fd - problem.gradient(w))))
