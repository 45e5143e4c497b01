"""Experiment runner: trace persistence, reference solutions, study drivers.

Traces are written as CSV (fixed column order, shortest round-trip float
formatting) next to a JSON sidecar that fully determines the run, so any
trace can be reproduced byte-for-byte from its sidecar alone.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .penalty import COST_MODEL_NOTE, CostMeter, PenaltyEvalContext, kkt_report
from .problems import (
    FiniteSumProblem,
    NoisyHs24Spec,
    gaussian_normalized_init,
    hs24_noisy_problem,
    logistic_problem,
    parse_libsvm,
)
from .solvers import (
    METHODS,
    RUNNERS,
    SolverConfig,
    SolverError,
    TraceRecord,
    aspen_run,
    default_sample_size,
)

TRACE_COLUMNS = [
    "k", "phase", "n_k", "mu_k", "alpha_k", "accepted",
    "fev", "feas", "grad_norm", "full_grad_norm", "gap", "eps_k",
]


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def trace_to_csv(trace: list[TraceRecord]) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for rec in trace:
        row = [
            rec.k, rec.phase, rec.n_k, rec.mu_k, rec.alpha_k, rec.accepted,
            rec.fev, rec.feas, rec.grad_norm, rec.full_grad_norm, rec.gap, rec.eps_k,
        ]
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_trace_csv(path: Path, trace: list[TraceRecord]) -> None:
    Path(path).write_text(trace_to_csv(trace))


def read_trace_csv(path: Path) -> list[dict]:
    """Parse a trace CSV back into dict rows (floats/ints/bools restored)."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    if header != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace columns {header}")
    rows = []
    for ln in lines[1:]:
        vals = ln.split(",")
        rec = dict(zip(header, vals))
        for key in ("k", "n_k", "fev"):
            rec[key] = int(rec[key])
        for key in ("mu_k", "alpha_k", "feas", "grad_norm", "full_grad_norm", "gap", "eps_k"):
            rec[key] = float(rec[key])
        rec["accepted"] = rec["accepted"] == "true"
        rows.append(rec)
    return rows


# ---------------------------------------------------------------------------
# Problem descriptors (what the sidecar stores)
# ---------------------------------------------------------------------------


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def logistic_descriptor(data_path: Path, scale_rows: bool = False) -> dict:
    data_path = Path(data_path)
    return {
        "kind": "logistic",
        "data_path": str(data_path),
        "data_sha256": _sha256_bytes(data_path.read_bytes()),
        "scale_rows": scale_rows,
    }


def hs24_descriptor(sigma: float, n_components: int, noise_seed: int) -> dict:
    return {
        "kind": "hs24",
        "sigma": sigma,
        "n_components": n_components,
        "noise_seed": noise_seed,
    }


def build_problem(descriptor: dict) -> FiniteSumProblem:
    kind = descriptor.get("kind")
    if kind == "logistic":
        path = Path(descriptor["data_path"])
        raw = path.read_bytes()
        expected = descriptor.get("data_sha256")
        if expected is not None and _sha256_bytes(raw) != expected:
            raise ValueError(f"data file {path} does not match the recorded hash")
        return logistic_problem(parse_libsvm(raw), scale_rows=descriptor.get("scale_rows", False))
    if kind == "hs24":
        spec = NoisyHs24Spec(
            N=int(descriptor["n_components"]),
            sigma=float(descriptor["sigma"]),
            seed=int(descriptor["noise_seed"]),
        )
        return hs24_noisy_problem(spec)
    raise ValueError(f"unknown problem kind {kind!r}")


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_to_dict(config: SolverConfig) -> dict:
    return {
        "n0": config.n0,
        "mu0": config.mu0,
        "c": config.c,
        "C": config.C,
        "gamma": config.gamma,
        "d_size": config.d_size,
        "growth": {"kind": config.growth.kind, "factor": config.growth.factor},
        "line_search": {
            "beta": config.line_search.beta,
            "eta": config.line_search.eta,
            "j_max": config.line_search.j_max,
        },
        "epsilon_exponent": config.epsilon.exponent,
        "budget_fev": config.budget_fev,
        "budget_iters": config.budget_iters,
        "seed": config.seed,
        "kkt_tol": config.kkt_tol,
    }


def config_from_dict(d: dict) -> SolverConfig:
    from .linesearch import EpsilonSchedule, LineSearchParams
    from .sampling import GrowthRule

    return SolverConfig(
        n0=int(d["n0"]),
        mu0=float(d["mu0"]),
        c=float(d["c"]),
        C=float(d["C"]),
        gamma=float(d["gamma"]),
        d_size=int(d["d_size"]),
        growth=GrowthRule(d["growth"]["kind"], float(d["growth"]["factor"])),
        line_search=LineSearchParams(
            beta=float(d["line_search"]["beta"]),
            eta=float(d["line_search"]["eta"]),
            j_max=int(d["line_search"]["j_max"]),
        ),
        epsilon=EpsilonSchedule(float(d["epsilon_exponent"])),
        budget_fev=int(d["budget_fev"]),
        budget_iters=int(d["budget_iters"]),
        seed=int(d["seed"]),
        kkt_tol=None if d.get("kkt_tol") is None else float(d["kkt_tol"]),
    )


# ---------------------------------------------------------------------------
# Reference solutions
# ---------------------------------------------------------------------------


class OracleFailure(RuntimeError):
    """Reference computation ran out of budget; carries the best report."""

    def __init__(self, message: str, best_stationarity: float, best_feasibility: float):
        super().__init__(
            f"{message} (best stationarity {best_stationarity:.3e}, "
            f"feasibility {best_feasibility:.3e})"
        )
        self.best_stationarity = best_stationarity
        self.best_feasibility = best_feasibility


@dataclass
class OracleSolution:
    """High-precision reference point on the penalty continuation path.

    `mu_final` is the penalty parameter the residuals were certified at;
    `provenance` hashes the (descriptor, tolerance) pair that produced it.
    """

    x_star: np.ndarray
    kkt_stationarity: float
    kkt_feasibility: float
    mu_final: float
    tol: float
    provenance: str
    descriptor: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "x_star": [float(v) for v in self.x_star],
            "kkt_stationarity": self.kkt_stationarity,
            "kkt_feasibility": self.kkt_feasibility,
            "mu_final": self.mu_final,
            "tol": self.tol,
            "provenance": self.provenance,
            "descriptor": self.descriptor,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "OracleSolution":
        d = json.loads(text)
        return cls(
            x_star=np.array(d["x_star"], dtype=float),
            kkt_stationarity=float(d["kkt_stationarity"]),
            kkt_feasibility=float(d["kkt_feasibility"]),
            mu_final=float(d["mu_final"]),
            tol=float(d["tol"]),
            provenance=str(d["provenance"]),
            descriptor=d.get("descriptor", {}),
        )


def load_oracle(path: Path) -> OracleSolution:
    return OracleSolution.from_json(Path(path).read_text())


def oracle_provenance(descriptor: dict, tol: float) -> str:
    """Content hash of (problem identity, tolerance).

    File paths are dropped from the identity: the logistic problem is
    pinned by its data hash, so caches stay valid when the repo moves.
    """
    identity = {k: v for k, v in descriptor.items() if k != "data_path"}
    return _sha256_bytes(_canonical_json({"descriptor": identity, "tol": tol}).encode())


def _full_penalty_value_grad(problem, mu, x):
    idx = np.arange(problem.N)
    h = problem.constraint_value(x)
    fval, fgrad = problem.sample_value_and_gradient(idx, x)
    value = fval + 0.5 * mu * float(h @ h)
    grad = fgrad + mu * problem.constraint_jtv(x, h)
    return value, grad


def _fd_hessian(problem, mu, x):
    """Central-difference Hessian of the full penalty, symmetrized."""
    n = x.size
    step = 1e-6 * (1.0 + float(np.linalg.norm(x)))
    H = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        _, gp = _full_penalty_value_grad(problem, mu, x + e)
        _, gm = _full_penalty_value_grad(problem, mu, x - e)
        H[:, j] = (gp - gm) / (2.0 * step)
    return 0.5 * (H + H.T)


def _minimize_penalty(problem, mu, x, grad_tol, max_iters=200):
    """Damped Newton on x -> F(x, mu) down to ||grad|| <= grad_tol.

    Falls back to a gradient step whenever the Newton direction is not a
    descent direction. Intended for the small, smooth reference problems
    (cost per step is 2n full-gradient evaluations for the Hessian).
    """
    value, grad = _full_penalty_value_grad(problem, mu, x)
    for _ in range(max_iters):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= grad_tol:
            return x, gnorm
        H = _fd_hessian(problem, mu, x)
        try:
            direction = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            direction = -grad
        if float(direction @ grad) >= 0.0:
            direction = -grad
        # plain Armijo damping
        t = 1.0
        for _ in range(60):
            x_new = x + t * direction
            v_new, g_new = _full_penalty_value_grad(problem, mu, x_new)
            if np.isfinite(v_new) and v_new <= value + 1e-4 * t * float(grad @ direction):
                break
            t *= 0.5
        else:
            return x, float(np.linalg.norm(grad))
        x, value, grad = x_new, v_new, g_new
    return x, float(np.linalg.norm(grad))


def compute_reference(
    problem: FiniteSumProblem,
    tol: float,
    cache_dir: Path | None = None,
    descriptor: dict | None = None,
    mu0: float = 1.0,
    mu_growth: float = 5.0,
    max_outer: int = 200,
    x0: np.ndarray | None = None,
) -> OracleSolution:
    """Reference point with KKT residuals below `tol`, cached on disk.

    Follows the quadratic-penalty continuation path (increase mu until
    the multiplier estimate mu h(x) stabilizes the residuals) and solves
    each penalized subproblem with a damped Newton method, since plain
    first-order steps cannot reach 1e-6 residuals once mu gets large.
    The result is verified with `kkt_report` before it is stored.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    descriptor = descriptor or {}
    provenance = oracle_provenance(descriptor, tol)
    cache_path = None
    if cache_dir is not None:
        cache_dir = Path(cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_path = cache_dir / f"oracle_{provenance[:16]}.json"
        if cache_path.exists():
            cached = load_oracle(cache_path)
            if cached.provenance == provenance:
                return cached

    x = gaussian_normalized_init(problem.n, seed=0) if x0 is None else np.asarray(x0, float).copy()
    mu = mu0
    best = (math.inf, math.inf)
    for _ in range(max_outer):
        x, _ = _minimize_penalty(problem, mu, x, grad_tol=max(0.5 * tol, 1e-13))
        report = kkt_report(PenaltyEvalContext(problem, mu, CostMeter()), x)
        best = min(best, (report.stationarity, report.feasibility))
        if report.stationarity <= tol and report.feasibility <= tol:
            solution = OracleSolution(
                x_star=x,
                kkt_stationarity=report.stationarity,
                kkt_feasibility=report.feasibility,
                mu_final=mu,
                tol=tol,
                provenance=provenance,
                descriptor=descriptor,
            )
            if cache_path is not None:
                cache_path.write_text(solution.to_json())
            return solution
        mu *= mu_growth
    raise OracleFailure(
        f"no point with KKT residuals <= {tol} within {max_outer} continuation steps",
        best[0], best[1],
    )


# ---------------------------------------------------------------------------
# Experiment driver
# ---------------------------------------------------------------------------


@dataclass
class ExperimentSpec:
    """One benchmark run: a problem, a set of methods, and shared seeds."""

    problem: dict  # descriptor
    methods: list[str]
    seeds: list[int]
    config: SolverConfig
    out_dir: Path
    oracle_path: Path | None = None
    record_full_grad: bool = False

    def validate(self) -> None:
        if not self.methods:
            raise ValueError("need at least one method")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if not self.seeds:
            raise ValueError("need at least one seed")


def _sidecar_payload(spec: ExperimentSpec, method: str, seed: int, config: SolverConfig) -> dict:
    return {
        "schema": TRACE_COLUMNS,
        "method": method,
        "seed": seed,
        "problem": spec.problem,
        "config": config_to_dict(config),
        "x0": {"kind": "gaussian-normalized", "seed": seed},
        "oracle_path": None if spec.oracle_path is None else str(spec.oracle_path),
        "record_full_grad": spec.record_full_grad,
        "cost_model": COST_MODEL_NOTE,
        "version": __version__,
    }


def run_experiment(spec: ExperimentSpec) -> dict:
    """Run every (method, seed) pair; one CSV + JSON sidecar per run.

    The starting point is shared across methods for each seed. A failing
    run is recorded (an .error.json file) without aborting its siblings.
    Returns {(method, seed): csv path or None}.
    """
    spec.validate()
    problem = build_problem(spec.problem)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x_star = None
    if spec.oracle_path is not None:
        x_star = load_oracle(spec.oracle_path).x_star

    results: dict = {}
    for seed in spec.seeds:
        x0 = gaussian_normalized_init(problem.n, seed)
        for method in spec.methods:
            config = replace(spec.config, seed=seed)
            stem = f"{method}_seed{seed}"
            csv_path = out_dir / f"{stem}.csv"
            sidecar_path = out_dir / f"{stem}.json"
            try:
                _, trace = RUNNERS[method](
                    problem, config, x0,
                    x_star=x_star, record_full_grad=spec.record_full_grad,
                )
            except SolverError as exc:
                (out_dir / f"{stem}.error.json").write_text(
                    json.dumps({"method": method, "seed": seed, "error": str(exc)}, indent=2)
                )
                results[(method, seed)] = None
                continue
            write_trace_csv(csv_path, trace)
            sidecar_path.write_text(
                json.dumps(_sidecar_payload(spec, method, seed, config),
                           sort_keys=True, indent=2) + "\n"
            )
            results[(method, seed)] = csv_path
    return results


def replay_sidecar(sidecar_path: Path) -> str:
    """Re-execute the run a sidecar describes and return the CSV text."""
    meta = json.loads(Path(sidecar_path).read_text())
    problem = build_problem(meta["problem"])
    config = config_from_dict(meta["config"])
    x0 = gaussian_normalized_init(problem.n, meta["x0"]["seed"])
    x_star = None
    if meta.get("oracle_path"):
        x_star = load_oracle(meta["oracle_path"]).x_star
    _, trace = RUNNERS[meta["method"]](
        problem, config, x0,
        x_star=x_star, record_full_grad=meta.get("record_full_grad", False),
    )
    return trace_to_csv(trace)


# ---------------------------------------------------------------------------
# Noise study
# ---------------------------------------------------------------------------


def noise_study(
    sigmas: list[float],
    n_components: int,
    seeds: list[int],
    out_dir: Path,
    budget_iters: int = 120,
    budget_fev: int = 10**12,
    config: SolverConfig | None = None,
    with_oracle: bool = True,
) -> list[dict]:
    """Adaptive-sampling runs across noise levels on the perturbed 2-D problem.

    For each (sigma, seed) the noise draw, starting point and sampler all
    derive from the seed. The horizon is an iteration count: the study
    compares sample-size growth per iteration, and an FEV horizon would
    let low-noise runs (cheaper iterations) run far deeper into the
    penalty schedule than high-noise ones. Emits per-run traces plus
    summary.csv with the per-sigma mean of the final sample size and
    final gap.
    """
    if not sigmas:
        raise ValueError("need at least one sigma")
    if not seeds:
        raise ValueError("need at least one seed")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = []
    for sigma in sigmas:
        final_ns, final_gaps = [], []
        for seed in seeds:
            descriptor = hs24_descriptor(sigma, n_components, noise_seed=seed)
            problem = build_problem(descriptor)
            x_star = None
            if with_oracle:
                x_star = compute_reference(problem, tol=1e-6, descriptor=descriptor).x_star
            cfg = config or SolverConfig(n0=default_sample_size(n_components))
            cfg = replace(cfg, seed=seed, budget_iters=budget_iters, budget_fev=budget_fev)
            x0 = gaussian_normalized_init(problem.n, seed)
            x_final, trace = aspen_run(problem, cfg, x0, x_star=x_star)
            write_trace_csv(out_dir / f"aspen_sigma{sigma}_seed{seed}.csv", trace)
            sidecar = {
                "schema": TRACE_COLUMNS,
                "method": "aspen",
                "seed": seed,
                "problem": descriptor,
                "config": config_to_dict(cfg),
                "x0": {"kind": "gaussian-normalized", "seed": seed},
                "sigma": sigma,
                "cost_model": COST_MODEL_NOTE,
                "version": __version__,
            }
            (out_dir / f"aspen_sigma{sigma}_seed{seed}.json").write_text(
                json.dumps(sidecar, sort_keys=True, indent=2) + "\n"
            )
            final_ns.append(trace[-1].n_k if trace else cfg.n0)
            if x_star is not None:
                final_gaps.append(float(np.linalg.norm(x_final - x_star)))
        row = {
            "sigma": sigma,
            "mean_final_n": float(np.mean(final_ns)),
            "mean_final_gap": float(np.mean(final_gaps)) if final_gaps else float("nan"),
            "n_seeds": len(seeds),
        }
        summary.append(row)

    lines = ["sigma,mean_final_n,mean_final_gap,n_seeds"]
    for row in summary:
        lines.append(
            f"{_fmt(row['sigma'])},{_fmt(row['mean_final_n'])},"
            f"{_fmt(row['mean_final_gap'])},{row['n_seeds']}"
        )
    (out_dir / "summary.csv").write_text("\n".join(lines) + "\n")
    return summary
