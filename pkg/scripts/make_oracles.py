#!/usr/bin/env python3
"""Compute and cache the reference solutions for the committed fixtures.

Writes content-addressed oracle files under data/oracles/. Each cache is
verified against the first-order residuals at storage time; tests reload
them and re-verify.
"""

from pathlib import Path

from aspen.harness import build_problem, compute_reference, hs24_descriptor, logistic_descriptor

ROOT = Path(__file__).parent.parent
ORACLE_DIR = ROOT / "data" / "oracles"

TOL = 1e-6


def main() -> None:
    targets = []
    for name in ("heart_synth", "australian_synth", "splice_synth"):
        descriptor = logistic_descriptor(ROOT / "data" / f"{name}.libsvm")
        descriptor["data_path"] = f"data/{name}.libsvm"  # repo-relative in the cache
        targets.append(descriptor)
    targets.append(hs24_descriptor(sigma=0.0, n_components=100, noise_seed=0))
    targets.append(hs24_descriptor(sigma=0.1, n_components=100, noise_seed=11))

    for descriptor in targets:
        problem = build_problem(descriptor)
        solution = compute_reference(problem, tol=TOL, cache_dir=ORACLE_DIR,
                                     descriptor=descriptor)
        label = descriptor.get("data_path", f"hs24 sigma={descriptor.get('sigma')}")
        print(f"{label}: stationarity {solution.kkt_stationarity:.2e}, "
              f"feasibility {solution.kkt_feasibility:.2e}, mu {solution.mu_final:g} "
              f"-> oracle_{solution.provenance[:16]}.json")


if __name__ == "__main__":
    main()
