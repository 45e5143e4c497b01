#!/usr/bin/env python3
"""Generate the committed desk-scale LIBSVM fixtures.

Synthetic binary classification data sized like small public benchmark
sets. Rows are drawn around two class centers (plus label flips), which
mirrors the row similarity of real datasets: mini-batch gradients stay
informative, so the adaptive solver has realistic dynamics. The third
fixture is higher-dimensional with wider clusters and is deliberately
hard. Deterministic: re-running reproduces the files byte for byte.
"""

from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).parent.parent / "data"

FIXTURES = {
    # name: (rows, features, cluster spread, label flip rate, data seed)
    "heart_synth": (270, 13, 0.25, 0.02, 101),
    "australian_synth": (690, 14, 0.25, 0.03, 202),
    "splice_synth": (500, 60, 0.35, 0.03, 303),
}


def make_dataset(n_rows: int, n_features: int, spread: float, flip: float, seed: int) -> str:
    rng = np.random.default_rng(seed)
    center = rng.standard_normal(n_features)
    center /= np.linalg.norm(center)
    labels = np.where(rng.random(n_rows) < 0.5, 1.0, -1.0)
    A = labels[:, None] * center[None, :] + spread * rng.standard_normal((n_rows, n_features))
    flips = rng.random(n_rows) < flip
    labels[flips] *= -1.0

    lines = []
    for i in range(n_rows):
        parts = ["+1" if labels[i] > 0 else "-1"]
        for j in range(n_features):
            parts.append(f"{j + 1}:{round(float(A[i, j]), 6)}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def main() -> None:
    OUT_DIR.mkdir(exist_ok=True)
    for name, (rows, feats, spread, flip, seed) in FIXTURES.items():
        path = OUT_DIR / f"{name}.libsvm"
        path.write_text(make_dataset(rows, feats, spread, flip, seed))
        print(f"wrote {path} ({rows} rows, {feats} features)")


if __name__ == "__main__":
    main()
