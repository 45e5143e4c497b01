#!/usr/bin/env python3
"""Produce the committed golden traces under data/golden/.

Small, deterministic runs used by the figure component's tests: a
three-method comparison on the heart fixture (with gap column from the
committed reference) and a four-level noise sweep.
"""

import json
from pathlib import Path

from aspen.harness import ExperimentSpec, logistic_descriptor, noise_study, run_experiment
from aspen.solvers import SolverConfig, default_sample_size

ROOT = Path(__file__).parent.parent
GOLDEN = ROOT / "data" / "golden"


def main() -> None:
    cfg = json.loads((ROOT / "configs" / "heart_synth.json").read_text())
    descriptor = logistic_descriptor(ROOT / "data" / "heart_synth.libsvm")
    descriptor["data_path"] = "data/heart_synth.libsvm"
    spec = ExperimentSpec(
        problem=descriptor,
        methods=["aspen", "full", "heur"],
        seeds=[0],
        config=SolverConfig(n0=default_sample_size(270), budget_fev=60_000, budget_iters=10**9),
        out_dir=GOLDEN / "bench",
        oracle_path=ROOT / cfg["oracle_path"],
    )
    results = run_experiment(spec)
    for key, path in sorted(results.items()):
        print(f"{key}: {path}")

    summary = noise_study(
        sigmas=[0.1, 0.5, 1.0, 2.0],
        n_components=100,
        seeds=[0],
        out_dir=GOLDEN / "noise",
        budget_iters=120,
        with_oracle=True,
    )
    for row in summary:
        print(row)


if __name__ == "__main__":
    main()
