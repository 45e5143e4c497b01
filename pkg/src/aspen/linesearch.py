"""Nonmonotone backtracking line search and its relaxation schedule.

The search direction is always the negative sampled penalty gradient.
Acceptance of a trial step alpha = beta^j requires

    F_S(x - alpha g, mu) <= F_S(x, mu) - eta alpha ||g||^2 + eps_k,

where eps_k is a summable positive sequence, so occasional increases of
the sampled penalty are tolerated and shrink over time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .penalty import PenaltyEvalContext, penalty_value


@dataclass
class LineSearchParams:
    beta: float = 0.1
    eta: float = 1e-4
    j_max: int = 50

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")


@dataclass
class EpsilonSchedule:
    """eps_k = (k + 1)^(-exponent); exponent > 1 keeps the series summable.

    The shift by one keeps the schedule defined at k = 0 without touching
    the tail behavior.
    """

    exponent: float = 1.1

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise ValueError("exponent must exceed 1 for a summable sequence")


def epsilon(schedule: EpsilonSchedule, k: int) -> float:
    if k < 0:
        raise ValueError("iteration index must be >= 0")
    return float(k + 1) ** (-schedule.exponent)


class LineSearchError(RuntimeError):
    """No step in {beta^0, ..., beta^j_max} satisfied the condition.

    With eps_k > 0 and a continuous objective this only happens when
    something upstream produced garbage (NaNs, a wrong gradient), so the
    run records it and stops instead of looping.
    """


class LineSearchResult(NamedTuple):
    alpha: float
    x_trial: np.ndarray
    f_trial: float
    trials: int  # number of penalty evaluations spent, including the accepted one


def backtrack(
    ctx: PenaltyEvalContext,
    sample,
    x: np.ndarray,
    g: np.ndarray,
    eps_k: float,
    params: LineSearchParams,
    f_x: float | None = None,
) -> LineSearchResult:
    """Largest step beta^j (smallest j) passing the relaxed Armijo test.

    `f_x` is the already-known value of F_S(x, mu); when omitted it is
    evaluated here and charged like any other evaluation. Every trial is
    charged to the cost meter. Non-finite trial values count as failures
    and backtracking continues.
    """
    if eps_k <= 0.0:
        raise ValueError("eps_k must be positive")
    if f_x is None:
        f_x = penalty_value(ctx, sample, x)

    gg = float(g @ g)
    trials = 0
    for j in range(params.j_max + 1):
        alpha = params.beta**j
        x_trial = x - alpha * g
        f_trial = penalty_value(ctx, sample, x_trial)
        trials += 1
        if np.isfinite(f_trial) and f_trial <= f_x - params.eta * alpha * gg + eps_k:
            return LineSearchResult(alpha, x_trial, f_trial, trials)

    raise LineSearchError(
        f"no step in {{beta^0..beta^{params.j_max}}} satisfied the descent test "
        f"(||g|| = {np.linalg.norm(g):.3e}, f(x) = {f_x:.6e})"
    )
