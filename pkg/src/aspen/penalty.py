"""Sampled quadratic-penalty evaluations and the FEV cost meter.

Cost model: the meter counts n-dimensional inner-product equivalents.
Per component evaluated at a point: 1 unit for the value (the forward
product), plus 1 more when the gradient is formed at the same point (the
accumulation pass). The constraint adds 1 unit for h(x) and 1 more for
the Jacobian-transpose product. Hence on a sample S at one point:

    value only          ->  |S| + 1
    gradient (or both)  -> 2|S| + 2

Forward products are shared between value and gradient at the same
(sample, point), which is why `penalty_eval` charges 2|S| + 2 and not
3|S| + 3. Diagnostics (KKT reports, gap tracking) never touch the meter:
it accounts for the optimizer's own work only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .problems import FiniteSumProblem

COST_MODEL_NOTE = (
    "fev counts n-dimensional inner products: value on sample S costs |S|+1 "
    "(forward products + constraint), value+gradient at one point costs "
    "2|S|+2 (forward products shared); line-search trials and acceptance-test "
    "evaluations are charged, diagnostics are not"
)


@dataclass
class CostMeter:
    """Monotone FEV counter, owned by a single run."""

    total: int = 0

    def charge(self, units: int) -> None:
        if units < 0:
            raise ValueError("cannot charge negative cost")
        self.total += units


@dataclass
class PenaltyEvalContext:
    """Problem + penalty parameter + the meter every evaluation charges.

    `mu` is allowed to be zero so the plain SAA objective can be driven
    through the same code path; solver configurations require mu > 0.
    """

    problem: FiniteSumProblem
    mu: float
    meter: CostMeter = field(default_factory=CostMeter)

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("penalty parameter must be >= 0")


@dataclass
class KktReport:
    """Multiplier estimate and first-order residuals at a point."""

    lam: np.ndarray
    stationarity: float
    feasibility: float


@dataclass
class PenaltyEval:
    """Value, gradient and constraint norm at one (sample, point)."""

    value: float
    gradient: np.ndarray
    h_norm: float


def _check_sample(problem: FiniteSumProblem, sample) -> np.ndarray:
    idx = np.asarray(sample, dtype=int)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("sample must be a nonempty 1-d index list")
    if idx.min() < 0 or idx.max() >= problem.N:
        raise IndexError(f"sample indices must lie in [0, {problem.N})")
    return idx


def value_cost(sample_size: int) -> int:
    return sample_size + 1


def gradient_cost(sample_size: int) -> int:
    return 2 * sample_size + 2


def penalty_value(ctx: PenaltyEvalContext, sample, x: np.ndarray) -> float:
    """F_S(x, mu) = (1/|S|) sum_{i in S} f_i(x) + (mu/2) ||h(x)||^2."""
    idx = _check_sample(ctx.problem, sample)
    h = ctx.problem.constraint_value(x)
    value = ctx.problem.sample_value(idx, x) + 0.5 * ctx.mu * float(h @ h)
    ctx.meter.charge(value_cost(idx.size))
    return value


def penalty_gradient(ctx: PenaltyEvalContext, sample, x: np.ndarray) -> np.ndarray:
    """grad F_S(x, mu) = (1/|S|) sum grad f_i(x) + mu grad^T h(x) h(x)."""
    idx = _check_sample(ctx.problem, sample)
    h = ctx.problem.constraint_value(x)
    g = ctx.problem.sample_gradient(idx, x) + ctx.mu * ctx.problem.constraint_jtv(x, h)
    ctx.meter.charge(gradient_cost(idx.size))
    return g


def penalty_eval(ctx: PenaltyEvalContext, sample, x: np.ndarray) -> PenaltyEval:
    """Value and gradient together, sharing the forward products."""
    idx = _check_sample(ctx.problem, sample)
    h = ctx.problem.constraint_value(x)
    hsq = float(h @ h)
    fval, fgrad = ctx.problem.sample_value_and_gradient(idx, x)
    value = fval + 0.5 * ctx.mu * hsq
    grad = fgrad + ctx.mu * ctx.problem.constraint_jtv(x, h)
    ctx.meter.charge(gradient_cost(idx.size))
    return PenaltyEval(value=value, gradient=grad, h_norm=float(np.sqrt(hsq)))


def constraint_violation(problem: FiniteSumProblem, x: np.ndarray) -> float:
    """||h(x)||; the squared-half violation is recoverable as result^2 / 2."""
    h = problem.constraint_value(x)
    return float(np.linalg.norm(h))


def full_penalty_gradient_norm(problem: FiniteSumProblem, mu: float, x: np.ndarray) -> float:
    """||grad F(x, mu)|| over all N components. Diagnostic, unmetered."""
    idx = np.arange(problem.N)
    h = problem.constraint_value(x)
    g = problem.sample_gradient(idx, x) + mu * problem.constraint_jtv(x, h)
    return float(np.linalg.norm(g))


def kkt_report(ctx: PenaltyEvalContext, x: np.ndarray) -> KktReport:
    """First-order residuals with the multiplier estimate lam = mu h(x).

    Stationarity is ||grad f(x) + grad^T h(x) lam|| over the full sample,
    which by construction equals ||grad F(x, mu)||. Unmetered diagnostic.
    """
    problem = ctx.problem
    h = problem.constraint_value(x)
    lam = ctx.mu * h
    grad_f = problem.sample_gradient(np.arange(problem.N), x)
    stationarity = float(np.linalg.norm(grad_f + problem.constraint_jtv(x, lam)))
    return KktReport(
        lam=lam,
        stationarity=stationarity,
        feasibility=float(np.linalg.norm(h)),
    )
