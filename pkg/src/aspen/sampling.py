"""Mini-batch selection, the small independent check sample, and growth rules.

Component indices are 0-based throughout; the full index set is
range(N). Mini-batches are drawn uniformly without replacement and
redrawn every iteration. The check sample is drawn from the full index
set, independently of the mini-batch, also without replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

GROWTH_KINDS = ("increment-by-one", "multiply-ceil", "jump-to-full")


@dataclass
class GrowthRule:
    """How the sample size moves when a growth step is triggered."""

    kind: str = "increment-by-one"
    factor: float = 1.1

    def __post_init__(self):
        if self.kind not in GROWTH_KINDS:
            raise ValueError(f"unknown growth rule {self.kind!r}")
        if self.kind == "multiply-ceil" and self.factor <= 1.0:
            raise ValueError("multiply-ceil needs factor > 1")


@dataclass
class SampleState:
    """Current sample size, the realized index set, and the run's RNG."""

    n_k: int
    indices: np.ndarray
    rng: np.random.Generator


def draw_minibatch(rng: np.random.Generator, N: int, n_k: int) -> np.ndarray:
    """n_k distinct indices uniform over range(N); the full ordered set
    when n_k == N (no randomness is consumed in that case)."""
    if not 1 <= n_k <= N:
        raise ValueError(f"sample size {n_k} out of range [1, {N}]")
    if n_k == N:
        return np.arange(N)
    return rng.choice(N, size=n_k, replace=False)


def draw_additional(rng: np.random.Generator, N: int, d_k: int, n_k: int) -> np.ndarray:
    """Independent check sample of d_k distinct indices from the full set.

    Eligibility requires d_k <= n_k: the check may not use more data than
    the mini-batch it is judging.
    """
    if d_k < 1:
        raise ValueError("check sample size must be >= 1")
    if d_k > n_k:
        raise ValueError(f"check sample size {d_k} exceeds current sample size {n_k}")
    if d_k == N:
        return np.arange(N)
    return rng.choice(N, size=d_k, replace=False)


def grow(rule: GrowthRule, n_k: int, N: int) -> int:
    """Next sample size in {n_k + 1, ..., N} under the given rule."""
    if n_k >= N:
        raise ValueError("sample size is already at the full set")
    if rule.kind == "increment-by-one":
        return n_k + 1
    if rule.kind == "multiply-ceil":
        # exact decimal arithmetic so e.g. ceil(1.1 * 100) is 110, not 111
        target = math.ceil(Fraction(str(rule.factor)) * n_k)
        return min(max(target, n_k + 1), N)
    return N  # jump-to-full
