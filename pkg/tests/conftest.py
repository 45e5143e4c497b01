import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # fixture_problems importable

from aspen.problems import (
    NoisyHs24Spec,
    SparseDataset,
    hs24_noisy_problem,
    logistic_problem,
    parse_libsvm,
)

DATA_DIR = Path(__file__).parent.parent / "data"


@pytest.fixture(scope="session")
def tiny_dataset() -> SparseDataset:
    text = "\n".join(
        [
            "+1 1:0.5 3:2.0",
            "-1 2:1.0 3:-0.5",
            "+1 1:-1.25 2:0.75",
            "-1 1:0.1 2:0.2 3:0.3",
            "+1 3:1.5",
        ]
    )
    return parse_libsvm(text)


@pytest.fixture(scope="session")
def tiny_logistic(tiny_dataset):
    return logistic_problem(tiny_dataset)


@pytest.fixture(scope="session")
def heart_problem():
    raw = (DATA_DIR / "heart_synth.libsvm").read_bytes()
    return logistic_problem(parse_libsvm(raw))


@pytest.fixture(scope="session")
def hs24_sigma01():
    return hs24_noisy_problem(NoisyHs24Spec(N=100, sigma=0.1, seed=11))


def random_unit(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n)
    return z / np.linalg.norm(z)
