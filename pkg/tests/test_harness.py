"""Trace persistence, reference solutions, and the experiment drivers."""

import json
from pathlib import Path

import numpy as np
import pytest

from aspen.harness import (
    ExperimentSpec,
    OracleFailure,
    build_problem,
    compute_reference,
    hs24_descriptor,
    load_oracle,
    logistic_descriptor,
    noise_study,
    oracle_provenance,
    read_trace_csv,
    replay_sidecar,
    run_experiment,
    trace_to_csv,
    write_trace_csv,
    TRACE_COLUMNS,
)
from aspen.penalty import CostMeter, PenaltyEvalContext, kkt_report
from aspen.problems import NoisyHs24Spec, hs24_noisy_problem
from aspen.solvers import SolverConfig, SolverError, aspen_run, default_sample_size
from conftest import DATA_DIR
from fixture_problems import SphereShiftProblem

HEART = DATA_DIR / "heart_synth.libsvm"


def small_spec(tmp_path, methods=("aspen", "full"), seeds=(0,), budget=4000, oracle=None):
    return ExperimentSpec(
        problem=logistic_descriptor(HEART),
        methods=list(methods),
        seeds=list(seeds),
        config=SolverConfig(n0=3, budget_fev=budget, budget_iters=10**9),
        out_dir=tmp_path / "out",
        oracle_path=oracle,
    )


# ---------------------------------------------------------------------------
# trace serialization
# ---------------------------------------------------------------------------


def test_trace_csv_roundtrip(tmp_path, hs24_sigma01):
    config = SolverConfig(n0=2, budget_iters=25, budget_fev=10**9, seed=3)
    _, trace = aspen_run(hs24_sigma01, config, np.array([1.0, 0.0]))
    path = tmp_path / "t.csv"
    write_trace_csv(path, trace)
    rows = read_trace_csv(path)
    assert len(rows) == len(trace)
    for rec, row in zip(trace, rows):
        assert row["k"] == rec.k
        assert row["mu_k"] == rec.mu_k  # repr round-trip is exact
        assert row["feas"] == rec.feas
        assert row["accepted"] == rec.accepted
        assert np.isnan(row["gap"]) == np.isnan(rec.gap)


def test_trace_csv_schema(tmp_path, hs24_sigma01):
    config = SolverConfig(n0=2, budget_iters=5, budget_fev=10**9, seed=3)
    _, trace = aspen_run(hs24_sigma01, config, np.array([1.0, 0.0]))
    text = trace_to_csv(trace)
    header = text.splitlines()[0]
    assert header == ",".join(TRACE_COLUMNS)
    assert all(len(line.split(",")) == len(TRACE_COLUMNS) for line in text.splitlines())
    with pytest.raises(ValueError):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        read_trace_csv(bad)


# ---------------------------------------------------------------------------
# reference solutions
# ---------------------------------------------------------------------------


def test_reference_analytic_sphere_case():
    prob = SphereShiftProblem(n=4)
    sol = compute_reference(prob, tol=1e-9)
    assert np.linalg.norm(sol.x_star - prob.known_solution) <= 1e-8
    assert sol.kkt_stationarity <= 1e-9
    assert sol.kkt_feasibility <= 1e-9


def test_reference_matches_circle_grid_search():
    # oracle: dense parametrization of the constraint set
    descriptor = hs24_descriptor(sigma=0.0, n_components=100, noise_seed=0)
    prob = build_problem(descriptor)
    sol = compute_reference(prob, tol=1e-6)

    thetas = np.linspace(0.0, 2.0 * np.pi, 1_000_000, endpoint=False)
    x1, x2 = np.cos(thetas), np.sin(thetas)
    values = (x1 - 2.0) ** 4 + (x1 - 2.0 * x2) ** 2
    best = np.argmin(values)
    x_grid = np.array([x1[best], x2[best]])
    assert np.linalg.norm(sol.x_star - x_grid) <= 1e-3


def test_reference_cache_bit_identical(tmp_path):
    descriptor = hs24_descriptor(sigma=0.3, n_components=20, noise_seed=5)
    prob = build_problem(descriptor)
    first = compute_reference(prob, tol=1e-6, cache_dir=tmp_path, descriptor=descriptor)
    again = compute_reference(prob, tol=1e-6, cache_dir=tmp_path, descriptor=descriptor)
    np.testing.assert_array_equal(first.x_star, again.x_star)
    assert first.provenance == again.provenance
    files = list(tmp_path.glob("oracle_*.json"))
    assert len(files) == 1


def test_reference_provenance_ignores_path(tmp_path):
    d1 = logistic_descriptor(HEART)
    d2 = dict(d1, data_path="somewhere/else.libsvm")
    assert oracle_provenance(d1, 1e-6) == oracle_provenance(d2, 1e-6)
    assert oracle_provenance(d1, 1e-6) != oracle_provenance(d1, 1e-7)


def test_reference_failure_reports_best():
    prob = SphereShiftProblem(n=3)
    with pytest.raises(OracleFailure) as err:
        compute_reference(prob, tol=1e-300, max_outer=2)
    assert err.value.best_stationarity < np.inf


def test_committed_oracles_reload_and_verify():
    oracle_dir = DATA_DIR / "oracles"
    files = sorted(oracle_dir.glob("oracle_*.json"))
    assert files, "committed oracle caches missing"
    for path in files:
        sol = load_oracle(path)
        prob = build_problem(_repo_relative(sol.descriptor))
        report = kkt_report(PenaltyEvalContext(prob, sol.mu_final, CostMeter()), sol.x_star)
        assert report.stationarity <= sol.tol
        assert report.feasibility <= sol.tol


def _repo_relative(descriptor):
    d = dict(descriptor)
    if "data_path" in d:
        d["data_path"] = str(Path(__file__).parent.parent / d["data_path"])
    return d


# ---------------------------------------------------------------------------
# experiment driver
# ---------------------------------------------------------------------------


def test_run_experiment_file_counts(tmp_path):
    spec = small_spec(tmp_path)
    results = run_experiment(spec)
    assert len(results) == 2
    csvs = sorted((tmp_path / "out").glob("*.csv"))
    sidecars = sorted(p for p in (tmp_path / "out").glob("*.json"))
    assert len(csvs) == 2
    assert len(sidecars) == 2
    assert {p.stem for p in csvs} == {"aspen_seed0", "full_seed0"}


def test_run_experiment_rerun_byte_identical(tmp_path):
    spec = small_spec(tmp_path)
    run_experiment(spec)
    first = {p.name: p.read_bytes() for p in (tmp_path / "out").glob("*")}
    run_experiment(spec)
    second = {p.name: p.read_bytes() for p in (tmp_path / "out").glob("*")}
    assert first == second


def test_run_experiment_shares_x0_across_methods(tmp_path):
    spec = small_spec(tmp_path, methods=("aspen", "full", "heur"), seeds=(7,))
    run_experiment(spec)
    rows = {
        m: read_trace_csv(tmp_path / "out" / f"{m}_seed7.csv")[0]
        for m in ("aspen", "full", "heur")
    }
    feas0 = {m: r["feas"] for m, r in rows.items()}
    assert len(set(feas0.values())) == 1  # identical starting point


def test_run_experiment_validation(tmp_path):
    spec = small_spec(tmp_path, methods=())
    with pytest.raises(ValueError):
        run_experiment(spec)
    spec = small_spec(tmp_path, seeds=())
    with pytest.raises(ValueError):
        run_experiment(spec)
    spec = small_spec(tmp_path, methods=("aspen", "sgd"))
    with pytest.raises(ValueError):
        run_experiment(spec)


def test_run_experiment_isolates_failures(tmp_path, monkeypatch):
    import aspen.harness as harness_mod

    def exploding(problem, config, x0, **kwargs):
        raise SolverError("boom", trace=[], x=np.asarray(x0))

    patched = dict(harness_mod.RUNNERS)
    patched["full"] = exploding
    monkeypatch.setattr(harness_mod, "RUNNERS", patched)

    spec = small_spec(tmp_path, methods=("full", "aspen"))
    results = run_experiment(spec)
    assert results[("full", 0)] is None
    assert results[("aspen", 0)] is not None
    assert (tmp_path / "out" / "full_seed0.error.json").exists()


def test_replay_sidecar_reproduces_csv(tmp_path):
    spec = small_spec(tmp_path, methods=("aspen",), seeds=(2,))
    run_experiment(spec)
    csv_path = tmp_path / "out" / "aspen_seed2.csv"
    sidecar = tmp_path / "out" / "aspen_seed2.json"
    assert replay_sidecar(sidecar) == csv_path.read_text()


def test_build_problem_detects_tampered_data(tmp_path):
    data = tmp_path / "d.libsvm"
    data.write_text("+1 1:1.0\n-1 1:2.0\n")
    descriptor = logistic_descriptor(data)
    data.write_text("+1 1:1.0\n-1 1:2.5\n")
    with pytest.raises(ValueError, match="hash"):
        build_problem(descriptor)


# ---------------------------------------------------------------------------
# noise study
# ---------------------------------------------------------------------------


def test_noise_study_outputs(tmp_path):
    summary = noise_study(
        sigmas=[0.5, 2.0],
        n_components=30,
        seeds=[0, 1],
        out_dir=tmp_path,
        budget_iters=40,
        with_oracle=False,
    )
    assert [row["sigma"] for row in summary] == [0.5, 2.0]
    assert (tmp_path / "summary.csv").exists()
    assert len(list(tmp_path.glob("aspen_sigma*.csv"))) == 4
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "sigma,mean_final_n,mean_final_gap,n_seeds"
    assert len(lines) == 3


def test_noise_study_sigma_zero_stays_near_initial_size(tmp_path):
    summary = noise_study(
        sigmas=[0.0],
        n_components=100,
        seeds=list(range(5)),
        out_dir=tmp_path,
        budget_iters=120,
        with_oracle=False,
    )
    assert summary[0]["mean_final_n"] <= default_sample_size(100) + 5


def test_noise_study_validation(tmp_path):
    with pytest.raises(ValueError):
        noise_study(sigmas=[], n_components=10, seeds=[0], out_dir=tmp_path)
    with pytest.raises(ValueError):
        noise_study(sigmas=[0.1], n_components=10, seeds=[], out_dir=tmp_path)
