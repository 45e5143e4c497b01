"""The adaptive-sampling penalty solver and the two reference methods.

All three methods share the same iteration skeleton: draw a sample,
take a nonmonotone backtracking step along the negative sampled penalty
gradient, then update the penalty parameter. They differ in how the
candidate point is accepted and how the sample size moves:

* `aspen_run` - while the sample is partial (MB phase), an independent
  check sample decides whether to keep the candidate or reject the step
  and grow the sample; the penalty grows whenever the constraint
  violation exceeds eps_k. Once the sample is full (FS phase, absorbing)
  candidates are always accepted and the penalty grows on the
  small-gradient test ||g_k|| < 1/mu_k.
* `full_run` - always the full sample; FS behavior from the start.
* `heur_run` - partial sample, candidates always accepted; the
  small-gradient test triggers sample growth by ceil(1.1 n_k) and the
  penalty bump together.

Each iteration emits one `TraceRecord` describing the k -> k+1
transition; iterate-dependent quantities (feasibility, gradient norm,
gap) refer to the pre-step iterate x_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linesearch import (
    EpsilonSchedule,
    LineSearchError,
    LineSearchParams,
    backtrack,
    epsilon,
)
from .penalty import (
    CostMeter,
    PenaltyEvalContext,
    full_penalty_gradient_norm,
    kkt_report,
    penalty_eval,
    penalty_value,
)
from .problems import FiniteSumProblem
from .sampling import GrowthRule, SampleState, draw_additional, draw_minibatch, grow

METHODS = ("aspen", "full", "heur")

# the heuristic baseline is defined with this growth rule
HEUR_GROWTH = GrowthRule("multiply-ceil", 1.1)


@dataclass
class SolverConfig:
    """Tunables shared by all three methods.

    Defaults follow the standard benchmark settings: mu0 = 1, c = 1e-4,
    C = 1, gamma = 1.1, a single-element check sample, beta = 0.1,
    eta = 1e-4 and the (k+1)^-1.1 relaxation schedule.
    """

    n0: int
    mu0: float = 1.0
    c: float = 1e-4
    C: float = 1.0
    gamma: float = 1.1
    d_size: int = 1
    growth: GrowthRule = field(default_factory=GrowthRule)
    line_search: LineSearchParams = field(default_factory=LineSearchParams)
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    budget_fev: int = 1_000_000
    budget_iters: int = 10_000_000
    seed: int = 0
    kkt_tol: float | None = None

    def validate(self, N: int) -> None:
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        if self.C <= 0.0:
            raise ValueError("C must be positive")
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")
        if self.mu0 <= 0.0:
            raise ValueError("mu0 must be positive")
        if not 1 <= self.n0 <= N:
            raise ValueError(f"n0 must lie in [1, {N}]")
        if not 1 <= self.d_size <= self.n0:
            raise ValueError("d_size must lie in [1, n0]")
        if self.budget_fev < 0 or self.budget_iters < 0:
            raise ValueError("budgets must be nonnegative")


def default_sample_size(N: int) -> int:
    """Standard initial mini-batch size: one percent of the data, at least 1."""
    return max(1, int(np.ceil(0.01 * N)))


@dataclass
class SolverState:
    x: np.ndarray
    k: int
    mu: float
    sample: SampleState
    meter: CostMeter
    N_total: int

    @property
    def phase(self) -> str:
        return "FS" if self.sample.n_k == self.N_total else "MB"


@dataclass
class TraceRecord:
    """One row per iteration; quantities at the pre-step iterate x_k."""

    k: int
    phase: str
    n_k: int
    mu_k: float
    alpha_k: float
    accepted: bool
    fev: int
    feas: float
    grad_norm: float
    full_grad_norm: float
    gap: float
    eps_k: float
    ls_trials: int  # line-search evaluations spent, kept out of the CSV schema


@dataclass
class IterationSnapshot:
    """Full pre/post detail of one iteration, for independent re-checking."""

    k: int
    phase: str
    x: np.ndarray
    sample: np.ndarray
    d_sample: np.ndarray | None
    gradient: np.ndarray
    f_value: float
    h_norm: float
    eps_k: float
    alpha: float
    x_candidate: np.ndarray
    accepted: bool
    x_next: np.ndarray
    mu: float
    mu_next: float
    n_k: int
    n_next: int


Observer = Callable[[IterationSnapshot], None]


class SolverError(RuntimeError):
    """A run stopped abnormally; carries the trace collected so far."""

    def __init__(self, message: str, trace: list[TraceRecord], x: np.ndarray):
        super().__init__(message)
        self.trace = trace
        self.x = x


def acceptance_check(
    ctx: PenaltyEvalContext,
    d_sample,
    x: np.ndarray,
    x_trial: np.ndarray,
    eps_k: float,
    c: float,
    C: float,
) -> bool:
    """Progress test on independent data:

        F_D(x_trial, mu) <= F_D(x, mu) - c ||grad F_D(x, mu)||^2 + C eps_k.

    Both evaluations are charged to the meter. A non-finite trial value
    counts as a violation.
    """
    ev = penalty_eval(ctx, d_sample, x)
    f_trial = penalty_value(ctx, d_sample, x_trial)
    bound = ev.value - c * float(ev.gradient @ ev.gradient) + C * eps_k
    return bool(np.isfinite(f_trial) and f_trial <= bound)


def _grad_test_mu_update(g_norm: float, mu: float, gamma: float) -> float:
    """Penalty bump when the sampled gradient is small: ||g|| < 1/mu."""
    return gamma * mu if g_norm < 1.0 / mu else mu


def _violation_test_mu_update(h_norm: float, eps_k: float, mu: float, gamma: float) -> float:
    """Penalty bump when the iterate is too infeasible: ||h(x_k)|| > eps_k."""
    return gamma * mu if h_norm > eps_k else mu


@dataclass
class _Diagnostics:
    x_star: np.ndarray | None = None
    record_full_grad: bool = False
    observer: Observer | None = None


def _emit(
    state: SolverState,
    problem: FiniteSumProblem,
    diag: _Diagnostics,
    *,
    phase: str,
    alpha: float,
    accepted: bool,
    h_norm: float,
    g_norm: float,
    eps_k: float,
    trials: int,
) -> TraceRecord:
    full_gnorm = (
        full_penalty_gradient_norm(problem, state.mu, state.x)
        if diag.record_full_grad
        else float("nan")
    )
    gap = (
        float(np.linalg.norm(state.x - diag.x_star))
        if diag.x_star is not None
        else float("nan")
    )
    return TraceRecord(
        k=state.k,
        phase=phase,
        n_k=state.sample.n_k,
        mu_k=state.mu,
        alpha_k=alpha,
        accepted=accepted,
        fev=state.meter.total,
        feas=h_norm,
        grad_norm=g_norm,
        full_grad_norm=full_gnorm,
        gap=gap,
        eps_k=eps_k,
        ls_trials=trials,
    )


def aspen_step(
    state: SolverState,
    problem: FiniteSumProblem,
    config: SolverConfig,
    diag: _Diagnostics | None = None,
) -> TraceRecord:
    """One iteration of the adaptive-sampling method; mutates `state`."""
    diag = diag or _Diagnostics()
    N = problem.N
    n_k = state.sample.n_k
    ctx = PenaltyEvalContext(problem, state.mu, state.meter)

    if n_k < N:
        idx = draw_minibatch(state.sample.rng, N, n_k)
    else:
        idx = np.arange(N)
    state.sample.indices = idx

    ev = penalty_eval(ctx, idx, state.x)
    eps_k = epsilon(config.epsilon, state.k)
    ls = backtrack(ctx, idx, state.x, ev.gradient, eps_k, config.line_search, f_x=ev.value)
    g_norm = float(np.linalg.norm(ev.gradient))

    if n_k == N:
        phase = "FS"
        d_idx = None
        accepted = True
        x_next = ls.x_trial
        n_next = n_k
        mu_next = _grad_test_mu_update(g_norm, state.mu, config.gamma)
    else:
        phase = "MB"
        d_idx = draw_additional(state.sample.rng, N, config.d_size, n_k)
        accepted = acceptance_check(ctx, d_idx, state.x, ls.x_trial, eps_k, config.c, config.C)
        if accepted:
            x_next = ls.x_trial
            n_next = n_k
        else:
            x_next = state.x
            n_next = grow(config.growth, n_k, N)
        mu_next = _violation_test_mu_update(ev.h_norm, eps_k, state.mu, config.gamma)

    record = _emit(
        state, problem, diag,
        phase=phase, alpha=ls.alpha, accepted=accepted,
        h_norm=ev.h_norm, g_norm=g_norm, eps_k=eps_k, trials=ls.trials,
    )
    if diag.observer is not None:
        diag.observer(
            IterationSnapshot(
                k=state.k, phase=phase, x=state.x.copy(), sample=idx.copy(),
                d_sample=None if d_idx is None else d_idx.copy(),
                gradient=ev.gradient.copy(), f_value=ev.value, h_norm=ev.h_norm,
                eps_k=eps_k, alpha=ls.alpha, x_candidate=ls.x_trial.copy(),
                accepted=accepted, x_next=x_next.copy(), mu=state.mu,
                mu_next=mu_next, n_k=n_k, n_next=n_next,
            )
        )
    state.x = x_next
    state.mu = mu_next
    state.k += 1
    state.sample.n_k = n_next
    return record


def full_step(
    state: SolverState,
    problem: FiniteSumProblem,
    config: SolverConfig,
    diag: _Diagnostics | None = None,
) -> TraceRecord:
    """One full-sample penalty iteration; identical to the FS branch above."""
    diag = diag or _Diagnostics()
    ctx = PenaltyEvalContext(problem, state.mu, state.meter)
    idx = np.arange(problem.N)
    state.sample.indices = idx

    ev = penalty_eval(ctx, idx, state.x)
    eps_k = epsilon(config.epsilon, state.k)
    ls = backtrack(ctx, idx, state.x, ev.gradient, eps_k, config.line_search, f_x=ev.value)
    g_norm = float(np.linalg.norm(ev.gradient))
    mu_next = _grad_test_mu_update(g_norm, state.mu, config.gamma)

    record = _emit(
        state, problem, diag,
        phase="FS", alpha=ls.alpha, accepted=True,
        h_norm=ev.h_norm, g_norm=g_norm, eps_k=eps_k, trials=ls.trials,
    )
    if diag.observer is not None:
        diag.observer(
            IterationSnapshot(
                k=state.k, phase="FS", x=state.x.copy(), sample=idx.copy(),
                d_sample=None, gradient=ev.gradient.copy(), f_value=ev.value,
                h_norm=ev.h_norm, eps_k=eps_k, alpha=ls.alpha,
                x_candidate=ls.x_trial.copy(), accepted=True,
                x_next=ls.x_trial.copy(), mu=state.mu, mu_next=mu_next,
                n_k=problem.N, n_next=problem.N,
            )
        )
    state.x = ls.x_trial
    state.mu = mu_next
    state.k += 1
    return record


def heur_step(
    state: SolverState,
    problem: FiniteSumProblem,
    config: SolverConfig,
    diag: _Diagnostics | None = None,
) -> TraceRecord:
    """One heuristic-baseline iteration: always accept; the small-gradient
    test bumps sample size (by ceil(1.1 n_k), clamped) and penalty together."""
    diag = diag or _Diagnostics()
    N = problem.N
    n_k = state.sample.n_k
    ctx = PenaltyEvalContext(problem, state.mu, state.meter)

    if n_k < N:
        idx = draw_minibatch(state.sample.rng, N, n_k)
    else:
        idx = np.arange(N)
    state.sample.indices = idx

    ev = penalty_eval(ctx, idx, state.x)
    eps_k = epsilon(config.epsilon, state.k)
    ls = backtrack(ctx, idx, state.x, ev.gradient, eps_k, config.line_search, f_x=ev.value)
    g_norm = float(np.linalg.norm(ev.gradient))

    triggered = g_norm < 1.0 / state.mu
    mu_next = config.gamma * state.mu if triggered else state.mu
    n_next = grow(HEUR_GROWTH, n_k, N) if (triggered and n_k < N) else n_k

    record = _emit(
        state, problem, diag,
        phase="FS" if n_k == N else "MB", alpha=ls.alpha, accepted=True,
        h_norm=ev.h_norm, g_norm=g_norm, eps_k=eps_k, trials=ls.trials,
    )
    if diag.observer is not None:
        diag.observer(
            IterationSnapshot(
                k=state.k, phase=record.phase, x=state.x.copy(), sample=idx.copy(),
                d_sample=None, gradient=ev.gradient.copy(), f_value=ev.value,
                h_norm=ev.h_norm, eps_k=eps_k, alpha=ls.alpha,
                x_candidate=ls.x_trial.copy(), accepted=True,
                x_next=ls.x_trial.copy(), mu=state.mu, mu_next=mu_next,
                n_k=n_k, n_next=n_next,
            )
        )
    state.x = ls.x_trial
    state.mu = mu_next
    state.k += 1
    state.sample.n_k = n_next
    return record


def _init_state(problem: FiniteSumProblem, config: SolverConfig, x0, n0: int) -> SolverState:
    x0 = np.asarray(x0, dtype=float).copy()
    if x0.shape != (problem.n,):
        raise ValueError(f"x0 must have shape ({problem.n},)")
    rng = np.random.default_rng(config.seed)
    sample = SampleState(n_k=n0, indices=np.arange(n0), rng=rng)
    return SolverState(
        x=x0, k=0, mu=config.mu0, sample=sample, meter=CostMeter(), N_total=problem.N
    )


def _run_loop(problem, config, x0, stepper, n0, *, x_star, record_full_grad, observer):
    config.validate(problem.N)
    diag = _Diagnostics(
        x_star=x_star if x_star is not None else problem.known_solution,
        record_full_grad=record_full_grad,
        observer=observer,
    )
    state = _init_state(problem, config, x0, n0)
    trace: list[TraceRecord] = []
    while state.k < config.budget_iters and state.meter.total < config.budget_fev:
        try:
            trace.append(stepper(state, problem, config, diag))
        except LineSearchError as exc:
            raise SolverError(f"line search failed at iteration {state.k}: {exc}",
                              trace, state.x) from exc
        if config.kkt_tol is not None:
            report = kkt_report(PenaltyEvalContext(problem, state.mu, CostMeter()), state.x)
            if report.stationarity <= config.kkt_tol and report.feasibility <= config.kkt_tol:
                break
    return state.x, trace


def aspen_run(
    problem: FiniteSumProblem,
    config: SolverConfig,
    x0,
    *,
    x_star: np.ndarray | None = None,
    record_full_grad: bool = False,
    observer: Observer | None = None,
):
    """Run the adaptive-sampling method until a budget is exhausted.

    Returns (final iterate, trace). With n0 = N this is the full-sample
    method from the first iteration onward.
    """
    return _run_loop(
        problem, config, x0, aspen_step, config.n0,
        x_star=x_star, record_full_grad=record_full_grad, observer=observer,
    )


def full_run(problem, config: SolverConfig, x0, *, x_star=None,
             record_full_grad=False, observer=None):
    """Full-sample penalty method (the deterministic reference)."""
    return _run_loop(
        problem, config, x0, full_step, problem.N,
        x_star=x_star, record_full_grad=record_full_grad, observer=observer,
    )


def heur_run(problem, config: SolverConfig, x0, *, x_star=None,
             record_full_grad=False, observer=None):
    """Heuristic growing-sample baseline."""
    return _run_loop(
        problem, config, x0, heur_step, config.n0,
        x_star=x_star, record_full_grad=record_full_grad, observer=observer,
    )


RUNNERS = {"aspen": aspen_run, "full": full_run, "heur": heur_run}
