#!/usr/bin/env python3
"""Write the committed per-fixture benchmark configs under configs/.

Budgets are desk-scale: large enough for the gap comparisons, small
enough that the whole benchmark suite runs in seconds.
"""

import json
from pathlib import Path

from aspen.harness import (
    config_to_dict,
    logistic_descriptor,
    oracle_provenance,
)
from aspen.solvers import SolverConfig, default_sample_size

ROOT = Path(__file__).parent.parent

FIXTURES = {
    "heart_synth": (270, 250_000),
    "australian_synth": (690, 250_000),
    "splice_synth": (500, 250_000),
}


def main() -> None:
    out = ROOT / "configs"
    out.mkdir(exist_ok=True)
    for name, (rows, budget_fev) in FIXTURES.items():
        descriptor = logistic_descriptor(ROOT / "data" / f"{name}.libsvm")
        # configs refer to repo-relative paths so runs work from the repo root
        descriptor["data_path"] = f"data/{name}.libsvm"
        tol = 1e-6
        oracle_file = f"data/oracles/oracle_{oracle_provenance(descriptor, tol)[:16]}.json"
        cfg = SolverConfig(
            n0=default_sample_size(rows),
            budget_fev=budget_fev,
            budget_iters=10**9,
        )
        payload = {
            "problem": descriptor,
            "methods": ["aspen", "full", "heur"],
            "seeds": [0, 1, 2, 3, 4],
            "oracle_path": oracle_file,
            "config": config_to_dict(cfg),
        }
        path = out / f"{name}.json"
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
