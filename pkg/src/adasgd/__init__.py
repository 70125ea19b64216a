"""SGD with AdaGrad-Norm stepsizes under affine-variance noise, plus a verification harness."""
from . import bounds, objectives, oracles, optimizer
from .objectives import SmoothProblem, lower_bound_quad, nonconvex_sine, quadratic
from .optimizer import AdaSgdConfig, KnownParamConfig, Trajectory, ada_step, known_stepsize, run, run_batch
from .oracles import BoundedAffine, Exact, NoiseParams, SubGaussianAffine, Truncated, TwoPointAdversarial
from .rng import RngStream

__version__ = "0.1.0"
