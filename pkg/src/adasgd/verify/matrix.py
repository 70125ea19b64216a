"""Randomized matrix of AdaSGD runs for the deterministic lemma suite."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..objectives import lower_bound_quad, nonconvex_sine, quadratic
from ..oracles import BoundedAffine, Exact, SubGaussianAffine, Truncated, TwoPointAdversarial
from ..optimizer import AdaSgdConfig, run_batch
from ..rng import RngStream
from .lemmas import LemmaCheck, check_trajectory

STEP_GRID = ((0.1, 0.1), (1.0, 1.0), (2.0, 0.5), (0.5, 3.0))


@dataclass
class MatrixCase:
    label: str
    trials: int
    checks: list[LemmaCheck]

    @property
    def passed(self) -> bool:
        return all(self.checks)


def default_cases(T: int):
    """(label, problem, w1, oracle) combinations; two-point noise only in one dimension."""
    problems = [
        ("quad10", quadratic(np.linspace(0.1, 1.0, 10), rotation_seed=3), np.full(10, 2.0)),
        ("sine10", nonconvex_sine(10), np.full(10, 1.5)),
        ("quad1", quadratic([2.0]), np.array([3.0])),
        ("lbquad", lower_bound_quad(0.5), np.array([3.0])),
        ("sine1", nonconvex_sine(1), np.array([2.5])),
    ]
    oracles = [
        ("exact", Exact()),
        ("bounded_add", BoundedAffine(1.0, 0.0)),
        ("bounded_affine", BoundedAffine(0.5, 1.0)),
        ("subgauss", SubGaussianAffine(1.0, 0.5)),
        ("truncated", Truncated(SubGaussianAffine(1.0, 0.5), 0.1, T)),
        ("two_point", TwoPointAdversarial(1.0, T)),
    ]
    for (pl, prob, w1), (ol, orc) in itertools.product(problems, oracles):
        if isinstance(orc, TwoPointAdversarial) and prob.dimension != 1:
            continue
        yield f"{pl}/{ol}", prob, w1, orc


def lemma_matrix(T: int = 512, trials_per_case: int = 2, seed: int = 0) -> list[MatrixCase]:
    out = []
    stream = 0
    for label, prob, w1, orc in default_cases(T):
        noise = orc.bound_params() if orc.bounded else None
        for eta, gamma in STEP_GRID:
            streams = [RngStream(seed, stream + i) for i in range(trials_per_case)]
            stream += trials_per_case
            traj = run_batch(prob, orc, AdaSgdConfig(eta, gamma), T, streams, w1)
            out.append(MatrixCase(f"{label}/eta={eta}/gamma={gamma}", trials_per_case,
                                  check_trajectory(traj, prob, noise)))
    return out
