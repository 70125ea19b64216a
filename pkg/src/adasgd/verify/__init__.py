from .concentration import ConcentrationResult, concentration_trial
from .coverage import CoverageResult, coverage_experiment, theorem_bounds
from .lemmas import (
    LemmaCheck,
    check_lemma1,
    check_lemma4,
    check_lemma6,
    check_lemma7,
    check_lemma8,
    check_lemma12,
    check_trajectory,
)
from .lowerbound import LowerBoundResult, full_sum_prediction, half_sum_prediction, integral_lower_bound, lower_bound_experiment
from .matrix import lemma_matrix
from .rates import RateFit, fit_loglog, rate_fit_experiment
from .truncation import TruncationResult, truncation_experiment
