"""Command-line entry point for running experiments and utilities.

Subcommands:

    run            one method on one problem, one or more seeds
    bench          several methods sharing starting points per seed
    oracle         compute (and cache) a reference solution
    noise-study    sweep noise levels on the perturbed 2-D problem
    validate-data  parse a LIBSVM file and report problems

A JSON config file (--config) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    ExperimentSpec,
    compute_reference,
    config_from_dict,
    hs24_descriptor,
    logistic_descriptor,
    noise_study,
    run_experiment,
)
from .problems import LibsvmParseError, parse_libsvm
from .solvers import METHODS, SolverConfig, default_sample_size


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", type=Path, help="LIBSVM file for the logistic problem")
    p.add_argument("--scale-rows", action="store_true",
                   help="rescale feature rows to unit norm")
    p.add_argument("--problem", choices=["logistic", "hs24"], default=None,
                   help="problem family (inferred from --data when omitted)")
    p.add_argument("--sigma", type=float, default=0.0, help="hs24 noise level")
    p.add_argument("--n", type=int, default=100, help="hs24 component count")
    p.add_argument("--noise-seed", type=int, default=0, help="hs24 noise draw seed")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    _add_problem_args(p)
    p.add_argument("--config", type=Path, help="JSON config file with defaults")
    p.add_argument("--seeds", type=_parse_int_list, default=None, help="comma-separated seeds")
    p.add_argument("--seed", type=int, default=None, help="single seed shorthand")
    p.add_argument("--budget-fev", type=int, default=None)
    p.add_argument("--budget-iters", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--oracle", type=Path, default=None,
                   help="cached reference solution for gap reporting")
    p.add_argument("--mu0", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--n0", type=int, default=None)
    p.add_argument("--d-size", type=int, default=None)
    p.add_argument("--full-grad", action="store_true",
                   help="also record the full-sample gradient norm (diagnostic)")


def _problem_descriptor(args) -> dict:
    kind = args.problem
    if kind is None:
        kind = "logistic" if args.data is not None else "hs24"
    if kind == "logistic":
        if args.data is None:
            raise SystemExit("error: the logistic problem needs --data")
        return logistic_descriptor(args.data, scale_rows=args.scale_rows)
    return hs24_descriptor(args.sigma, args.n, args.noise_seed)


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SystemExit(f"error: config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: config file {path} is not valid JSON: {exc}") from None


def _solver_config(args, file_cfg: dict, N: int) -> SolverConfig:
    if "config" in file_cfg:
        config = config_from_dict(file_cfg["config"])
    else:
        config = SolverConfig(n0=default_sample_size(N))
    overrides = {
        "n0": args.n0,
        "mu0": args.mu0,
        "gamma": args.gamma,
        "d_size": getattr(args, "d_size", None),
        "budget_fev": args.budget_fev,
        "budget_iters": args.budget_iters,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    return config


def _seeds(args, file_cfg: dict) -> list[int]:
    if args.seeds is not None:
        return args.seeds
    if args.seed is not None:
        return [args.seed]
    if "seeds" in file_cfg:
        return [int(s) for s in file_cfg["seeds"]]
    return [0]


def _cmd_run_or_bench(args, methods: list[str]) -> int:
    file_cfg = _load_config_file(args.config)
    descriptor = file_cfg.get("problem") if args.data is None and args.problem is None else None
    if descriptor is None:
        descriptor = _problem_descriptor(args)
    from .harness import build_problem

    problem = build_problem(descriptor)
    config = _solver_config(args, file_cfg, problem.N)
    spec = ExperimentSpec(
        problem=descriptor,
        methods=methods,
        seeds=_seeds(args, file_cfg),
        config=config,
        out_dir=args.out,
        oracle_path=args.oracle or (Path(file_cfg["oracle_path"]) if file_cfg.get("oracle_path") else None),
        record_full_grad=args.full_grad,
    )
    results = run_experiment(spec)
    failed = [key for key, path in results.items() if path is None]
    for (method, seed), path in sorted(results.items()):
        status = path if path is not None else "FAILED (see .error.json)"
        print(f"{method} seed={seed}: {status}")
    return 1 if failed else 0


def _cmd_run(args) -> int:
    if args.method not in METHODS:
        raise SystemExit(f"error: unknown method {args.method!r}")
    return _cmd_run_or_bench(args, [args.method])


def _cmd_bench(args) -> int:
    methods = [m for m in args.methods.split(",") if m]
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise SystemExit(f"error: unknown methods {sorted(unknown)}")
    return _cmd_run_or_bench(args, methods)


def _cmd_oracle(args) -> int:
    descriptor = _problem_descriptor(args)
    from .harness import build_problem

    problem = build_problem(descriptor)
    solution = compute_reference(
        problem, tol=args.tol, cache_dir=args.out, descriptor=descriptor
    )
    cache_file = Path(args.out) / f"oracle_{solution.provenance[:16]}.json"
    print(f"reference written: {cache_file}")
    print(f"stationarity {solution.kkt_stationarity:.3e}, "
          f"feasibility {solution.kkt_feasibility:.3e}, mu {solution.mu_final:g}")
    return 0


def _cmd_noise_study(args) -> int:
    summary = noise_study(
        sigmas=args.sigmas,
        n_components=args.n,
        seeds=args.seeds if args.seeds is not None else list(range(10)),
        out_dir=args.out,
        budget_iters=args.budget_iters,
    )
    for row in summary:
        print(f"sigma={row['sigma']:g}: mean final sample size {row['mean_final_n']:.1f}, "
              f"mean final gap {row['mean_final_gap']:.3e}")
    return 0


def _cmd_validate_data(args) -> int:
    try:
        raw = Path(args.path).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return 1
    try:
        ds = parse_libsvm(raw)
    except LibsvmParseError as exc:
        print(f"error: {args.path}: {exc}", file=sys.stderr)
        return 1
    pos = sum(1 for lab, _ in ds.rows if lab > 0)
    print(f"{args.path}: {ds.n_rows} rows, {ds.n_features} features, "
          f"{pos} positive / {ds.n_rows - pos} negative labels")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aspen", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one method")
    p_run.add_argument("--method", default="aspen", help="aspen | full | heur")
    _add_run_args(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="compare methods with shared starting points")
    p_bench.add_argument("--methods", default="aspen,full,heur",
                         help="comma-separated subset of aspen,full,heur")
    _add_run_args(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_oracle = sub.add_parser("oracle", help="compute and cache a reference solution")
    _add_problem_args(p_oracle)
    p_oracle.add_argument("--tol", type=float, default=1e-6)
    p_oracle.add_argument("--out", type=Path, default=Path("data/oracles"))
    p_oracle.set_defaults(func=_cmd_oracle)

    p_noise = sub.add_parser("noise-study", help="noise sweep on the perturbed 2-D problem")
    p_noise.add_argument("--sigmas", type=_parse_float_list, default=[0.1, 0.5, 1.0, 2.0])
    p_noise.add_argument("--n", type=int, default=100)
    p_noise.add_argument("--seeds", type=_parse_int_list, default=None)
    p_noise.add_argument("--budget-iters", type=int, default=120)
    p_noise.add_argument("--out", type=Path, default=Path("out/noise"))
    p_noise.set_defaults(func=_cmd_noise_study)

    p_val = sub.add_parser("validate-data", help="check a LIBSVM file")
    p_val.add_argument("path", type=Path)
    p_val.set_defaults(func=_cmd_validate_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cli_main(argv: list[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
