"""Experiment configuration: JSON files validated fail-closed (unknown keys rejected)."""
from __future__ import annotations

from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import objectives, oracles
from .errors import ConfigurationError
from .optimizer import AdaSgdConfig, AlgorithmConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProblemSpec(_Strict):
    kind: Literal["quadratic", "lower_bound_quad", "nonconvex_sine"]
    dim: Optional[int] = Field(default=None, ge=1)
    eigenvalues: Optional[list[float]] = None
    eig_range: Optional[tuple[float, float]] = None
    rotation_seed: Optional[int] = Field(default=None, ge=0)
    center: Optional[list[float]] = None
    f_star: float = 0.0
    beta: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _shape(self):
        if self.kind == "quadratic":
            if (self.eigenvalues is None) == (self.eig_range is None):
                raise ValueError("quadratic needs exactly one of eigenvalues or eig_range")
            if self.eig_range is not None and self.dim is None:
                raise ValueError("eig_range needs dim")
            if self.eigenvalues is not None and any(e < 0 for e in self.eigenvalues):
                raise ValueError("eigenvalues must be non-negative")
            if self.eig_range is not None and not 0 <= self.eig_range[0] <= self.eig_range[1]:
                raise ValueError("eig_range must satisfy 0 <= lo <= hi")
        elif self.kind == "lower_bound_quad":
            if self.beta is None:
                raise ValueError("lower_bound_quad needs beta")
        elif self.dim is None:
            raise ValueError("nonconvex_sine needs dim")
        return self

    def build(self) -> objectives.SmoothProblem:
        if self.kind == "quadratic":
            eig = self.eigenvalues if self.eigenvalues is not None else np.linspace(*self.eig_range, self.dim)
            return objectives.quadratic(eig, self.rotation_seed, self.center, self.f_star)
        if self.kind == "lower_bound_quad":
            return objectives.lower_bound_quad(self.beta)
        return objectives.nonconvex_sine(self.dim)


class OracleSpec(_Strict):
    kind: Literal["exact", "bounded_affine", "subgaussian_affine", "truncated", "two_point"]
    sigma0: float = Field(default=0.0, ge=0)
    sigma1: float = Field(default=0.0, ge=0)
    sigma: float = Field(default=1.0, ge=0)
    delta_prime: float = Field(default=0.1, gt=0, lt=1)
    inner: Optional["OracleSpec"] = None
    force_low: bool = False

    def build(self, T: int) -> oracles.Oracle:
        if self.kind == "exact":
            return oracles.Exact()
        if self.kind == "bounded_affine":
            return oracles.BoundedAffine(self.sigma0, self.sigma1)
        if self.kind == "subgaussian_affine":
            return oracles.SubGaussianAffine(self.sigma0, self.sigma1)
        if self.kind == "two_point":
            return oracles.TwoPointAdversarial(self.sigma, max(T, 2), self.force_low)
        inner = self.inner.build(T) if self.inner is not None else oracles.SubGaussianAffine(self.sigma0, self.sigma1)
        return oracles.Truncated(inner, self.delta_prime, max(T, 2))


class AlgorithmSpec(_Strict):
    kind: Literal["adasgd", "tuned"]
    eta: Optional[float] = Field(default=None, gt=0)
    gamma: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _params(self):
        if self.kind == "adasgd" and (self.eta is None or self.gamma is None):
            raise ValueError("adasgd needs eta and gamma")
        if self.kind == "tuned" and self.alpha is None:
            raise ValueError("tuned needs alpha")
        return self


class ExperimentConfig(_Strict):
    kind: Literal["run", "coverage", "ratefit", "lowerbound", "concentration", "lemmas"]
    seed: int = Field(ge=0, lt=2**64)
    problem: Optional[ProblemSpec] = None
    oracle: Optional[OracleSpec] = None
    algorithm: Optional[AlgorithmSpec] = None
    w1: Union[float, list[float]] = 0.0
    T: Optional[int] = Field(default=None, ge=1)
    T_grid: Optional[list[int]] = None
    delta: float = Field(default=0.1, gt=0, lt=1)
    trials: int = Field(default=100, ge=1)
    output_dir: Optional[str] = None
    # coverage
    theorem: Optional[Literal["thm1", "thm2", "thm5"]] = None
    min_rate_coverage: Optional[float] = Field(default=None, ge=0, le=1)
    # ratefit
    metric: Literal["grad_avg", "avg_gap"] = "grad_avg"
    expect_slope: Optional[tuple[float, float]] = None
    # lowerbound
    sigma: float = Field(default=1.0, gt=0)
    gammas: Optional[list[float]] = None
    beta: Optional[float] = Field(default=None, gt=0)
    # concentration
    inequality: Optional[Literal["lemma5", "lemma14"]] = None
    generator: Optional[str] = None
    lam: float = Field(default=1.0, gt=0)
    # lemmas
    trials_per_case: int = Field(default=2, ge=1)

    @model_validator(mode="after")
    def _required(self):
        need = {
            "run": ("problem", "oracle", "algorithm", "T"),
            "coverage": ("problem", "oracle", "algorithm", "T", "theorem"),
            "ratefit": ("problem", "oracle", "algorithm", "T_grid"),
            "lowerbound": ("T", "gammas"),
            "concentration": ("inequality", "generator", "T"),
            "lemmas": ("T",),
        }[self.kind]
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ValueError(f"{self.kind} experiment needs {', '.join(missing)}")
        if self.kind == "coverage" and self.trials < 100:
            raise ValueError("coverage needs at least 100 trials")
        return self

    def start_point(self, problem) -> np.ndarray:
        w1 = np.asarray(self.w1, dtype=np.float64)
        if w1.ndim == 0:
            return np.full(problem.dimension, float(w1))
        if w1.shape != (problem.dimension,):
            raise ConfigurationError(f"w1 has length {w1.size}, problem dimension is {problem.dimension}")
        return w1

    def build_algorithm(self, problem, oracle, T: int) -> AlgorithmConfig:
        from .verify.common import tuned_config

        a = self.algorithm
        if a.kind == "adasgd":
            return AdaSgdConfig(a.eta, a.gamma)
        return tuned_config(problem, oracle, T, self.delta, a.alpha)

    def effective(self) -> dict:
        """Config with defaults resolved, minus the output location."""
        return self.model_dump(mode="json", exclude={"output_dir"})
