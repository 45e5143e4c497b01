"""Additional-sampling quadratic-penalty solver for constrained finite sums."""

__version__ = "0.1.0"

from .linesearch import EpsilonSchedule, LineSearchError, LineSearchParams, backtrack, epsilon
from .penalty import (
    CostMeter,
    KktReport,
    PenaltyEvalContext,
    constraint_violation,
    kkt_report,
    penalty_eval,
    penalty_gradient,
    penalty_value,
)
from .problems import (
    FiniteSumProblem,
    Hs24NoisyProblem,
    LibsvmParseError,
    LogisticProblem,
    NoisyHs24Spec,
    SparseDataset,
    gaussian_normalized_init,
    hs24_noisy_problem,
    logistic_problem,
    parse_libsvm,
    serialize_libsvm,
)
from .sampling import GrowthRule, SampleState, draw_additional, draw_minibatch, grow
from .solvers import (
    SolverConfig,
    SolverError,
    SolverState,
    TraceRecord,
    acceptance_check,
    aspen_run,
    aspen_step,
    default_sample_size,
    full_run,
    heur_run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
