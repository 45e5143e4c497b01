"""Finite-sum constrained problem families and data loading.

A problem is the mean of N component functions f_i plus a vector equality
constraint h(x) = 0. Solvers only ever touch the `FiniteSumProblem`
interface, so new problem families can be added without touching them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class LibsvmParseError(ValueError):
    """Malformed LIBSVM input. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DimensionMismatchError(ValueError):
    pass


def _check_dim(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatchError(f"expected vector of shape ({n},), got {x.shape}")
    return x


class FiniteSumProblem:
    """Contract: objective (1/N) sum_i f_i(x) subject to h(x) = 0.

    Subclasses must set `n` (dimension), `N` (component count), `m`
    (constraint count) and implement the four evaluation methods.
    `known_solution` may hold a reference optimum for gap reporting.

    The `sample_*` methods evaluate SAA means over an index subset; the
    default implementations loop over `component_*` and subclasses
    override them with vectorized versions.
    """

    n: int
    N: int
    m: int
    known_solution: np.ndarray | None = None

    def component_value(self, i: int, x: np.ndarray) -> float:
        raise NotImplementedError

    def component_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def constraint_value(self, x: np.ndarray) -> np.ndarray:
        """h(x), shape (m,)."""
        raise NotImplementedError

    def constraint_jtv(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Jacobian-transpose action grad^T h(x) @ v, shape (n,)."""
        raise NotImplementedError

    def sample_value(self, indices: np.ndarray, x: np.ndarray) -> float:
        return float(np.mean([self.component_value(i, x) for i in indices]))

    def sample_gradient(self, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self.n)
        for i in indices:
            g += self.component_gradient(i, x)
        return g / len(indices)

    def sample_value_and_gradient(
        self, indices: np.ndarray, x: np.ndarray
    ) -> tuple[float, np.ndarray]:
        return self.sample_value(indices, x), self.sample_gradient(indices, x)


class UnitSphereConstraint:
    """h(x) = [||x||^2 - 1], the single constraint used by the shipped families."""

    m = 1

    def constraint_value(self, x: np.ndarray) -> np.ndarray:
        x = _check_dim(x, self.n)
        return np.array([float(x @ x) - 1.0])

    def constraint_jtv(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        x = _check_dim(x, self.n)
        v = np.asarray(v, dtype=float)
        if v.shape != (1,):
            raise DimensionMismatchError(f"expected multiplier of shape (1,), got {v.shape}")
        return 2.0 * v[0] * x


# ---------------------------------------------------------------------------
# LIBSVM sparse text format
# ---------------------------------------------------------------------------


@dataclass
class SparseDataset:
    """Rows of (label, [(1-based feature index, value), ...]).

    Labels are normalized to {-1, +1}. Feature indices follow the text
    format: 1-based and strictly increasing within a row.
    """

    rows: list[tuple[int, list[tuple[int, float]]]]
    n_features: int

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def labels(self) -> np.ndarray:
        return np.array([lab for lab, _ in self.rows], dtype=float)

    def dense_features(self) -> np.ndarray:
        """Materialize rows as a dense (n_rows, n_features) matrix."""
        A = np.zeros((self.n_rows, self.n_features))
        for r, (_, feats) in enumerate(self.rows):
            for idx, val in feats:
                A[r, idx - 1] = val
        return A


# label families the format allows; a parsed label must stay compatible
# with at least one of them
_LABEL_FAMILIES = (
    frozenset({-1, 1}),
    frozenset({0, 1}),
    frozenset({1, 2}),
)


def parse_libsvm(text: str | bytes) -> SparseDataset:
    """Parse LIBSVM sparse text: `<label> <idx>:<val> ...` per line.

    Labels may come from {-1,+1}, {0,1} or {1,2}; they are normalized to
    {-1,+1} (0 -> -1, and for {1,2} files 2 -> -1). Blank lines are
    skipped. Any malformed content raises `LibsvmParseError` naming the
    offending line.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    raw_rows: list[tuple[int, int, list[tuple[int, float]]]] = []  # (line_no, label, feats)
    candidates = set(_LABEL_FAMILIES)
    n_features = 0

    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        label = _parse_label(tokens[0], line_no)
        remaining = {fam for fam in candidates if label in fam}
        if not remaining:
            raise LibsvmParseError(
                line_no, f"label {label} is incompatible with the labels seen so far"
            )
        candidates = remaining

        feats: list[tuple[int, float]] = []
        prev_idx = 0
        for tok in tokens[1:]:
            idx, val = _parse_feature(tok, line_no)
            if idx <= prev_idx:
                raise LibsvmParseError(
                    line_no, f"feature index {idx} is not strictly increasing"
                )
            prev_idx = idx
            feats.append((idx, val))
        if feats:
            n_features = max(n_features, feats[-1][0])
        raw_rows.append((line_no, label, feats))

    if not raw_rows:
        raise LibsvmParseError(1, "empty input: no data rows")

    family = min(candidates, key=sorted)  # deterministic pick when ambiguous
    rows = [(_normalize_label(lab, family), feats) for _, lab, feats in raw_rows]
    return SparseDataset(rows=rows, n_features=n_features)


def _parse_label(token: str, line_no: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise LibsvmParseError(line_no, f"malformed label token {token!r}") from None
    if not value.is_integer() or int(value) not in {-1, 0, 1, 2}:
        raise LibsvmParseError(line_no, f"unsupported label value {token!r}")
    return int(value)


def _parse_feature(token: str, line_no: int) -> tuple[int, float]:
    parts = token.split(":")
    if len(parts) != 2:
        raise LibsvmParseError(line_no, f"malformed feature token {token!r}")
    idx_s, val_s = parts
    try:
        idx = int(idx_s)
    except ValueError:
        raise LibsvmParseError(line_no, f"malformed feature index in {token!r}") from None
    if idx < 1:
        raise LibsvmParseError(line_no, f"feature index {idx} must be >= 1")
    try:
        val = float(val_s)
    except ValueError:
        raise LibsvmParseError(line_no, f"malformed feature value in {token!r}") from None
    if not np.isfinite(val):
        raise LibsvmParseError(line_no, f"non-finite feature value in {token!r}")
    return idx, val


def _normalize_label(label: int, family: frozenset) -> int:
    if family == frozenset({-1, 1}):
        return label
    if family == frozenset({0, 1}):
        return -1 if label == 0 else 1
    return -1 if label == 2 else 1


def serialize_libsvm(dataset: SparseDataset) -> str:
    """Inverse of `parse_libsvm` on normalized datasets (exact round-trip)."""
    lines = []
    for label, feats in dataset.rows:
        parts = ["+1" if label > 0 else "-1"]
        parts.extend(f"{idx}:{repr(val)}" for idx, val in feats)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Problem families
# ---------------------------------------------------------------------------


def _stable_sigmoid(t: np.ndarray) -> np.ndarray:
    """1 / (1 + exp(-t)) without overflow for large |t|."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    out[~pos] = et / (1.0 + et)
    return out


class LogisticProblem(UnitSphereConstraint, FiniteSumProblem):
    """Binary logistic loss per data row, constrained to the unit sphere.

    f_i(x) = log(1 + exp(-b_i a_i^T x)), evaluated in log-sum-exp form so
    values stay finite for margins up to +-1e4 and beyond.
    """

    def __init__(self, features: np.ndarray, labels: np.ndarray):
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=float)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise DimensionMismatchError("features must be (N, n) with one label per row")
        if features.shape[0] < 1:
            raise ValueError("need at least one data row")
        if not np.all(np.abs(labels) == 1.0):
            raise ValueError("labels must be -1 or +1")
        self.A = features
        self.b = labels
        self.N, self.n = features.shape

    def component_value(self, i: int, x: np.ndarray) -> float:
        x = _check_dim(x, self.n)
        t = -self.b[i] * float(self.A[i] @ x)
        return float(np.logaddexp(0.0, t))

    def component_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        x = _check_dim(x, self.n)
        t = -self.b[i] * float(self.A[i] @ x)
        coef = -self.b[i] * float(_stable_sigmoid(np.array([t]))[0])
        return coef * self.A[i]

    def sample_value(self, indices: np.ndarray, x: np.ndarray) -> float:
        x = _check_dim(x, self.n)
        sub = self.A[indices]
        t = -self.b[indices] * (sub @ x)
        return float(np.mean(np.logaddexp(0.0, t)))

    def sample_gradient(self, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.sample_value_and_gradient(indices, x)[1]

    def sample_value_and_gradient(self, indices, x):
        x = _check_dim(x, self.n)
        sub = self.A[indices]
        b = self.b[indices]
        t = -b * (sub @ x)  # one forward product per component, shared below
        value = float(np.mean(np.logaddexp(0.0, t)))
        coef = -b * _stable_sigmoid(t)
        grad = sub.T @ coef / len(indices)
        return value, grad


def logistic_problem(data: SparseDataset, scale_rows: bool = False) -> LogisticProblem:
    """Build the sphere-constrained logistic problem from a parsed dataset.

    `scale_rows` rescales every feature row to unit Euclidean norm
    (off by default: raw features are the baseline).
    """
    A = data.dense_features()
    if scale_rows:
        norms = np.linalg.norm(A, axis=1)
        norms[norms == 0.0] = 1.0
        A = A / norms[:, None]
    return LogisticProblem(A, data.labels())


@dataclass
class NoisyHs24Spec:
    """Component count, noise level and the frozen noise draw.

    The per-component perturbations are drawn once at construction so the
    objective is a fixed finite sum; evaluations are deterministic
    afterwards.
    """

    N: int
    sigma: float
    seed: int
    noise: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need N >= 1 components")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.noise is None:
            rng = np.random.default_rng(self.seed)
            self.noise = rng.normal(0.0, self.sigma, self.N)
        self.noise = np.asarray(self.noise, dtype=float)
        if self.noise.shape != (self.N,):
            raise ValueError("noise vector must have exactly N entries")


class Hs24NoisyProblem(UnitSphereConstraint, FiniteSumProblem):
    """Quartic-plus-quadratic 2-D objective with per-component noise terms.

    f_i(x) = (x1 - 2)^4 + (x1 - 2 x2)^2 + eps_i^2 ||x||^2 on the unit
    sphere. Larger noise spread makes the components more heterogeneous.
    """

    n = 2

    def __init__(self, spec: NoisyHs24Spec):
        self.spec = spec
        self.N = spec.N
        self.eps_sq = spec.noise**2

    @staticmethod
    def _base_value(x: np.ndarray) -> float:
        return float((x[0] - 2.0) ** 4 + (x[0] - 2.0 * x[1]) ** 2)

    @staticmethod
    def _base_gradient(x: np.ndarray) -> np.ndarray:
        d = x[0] - 2.0 * x[1]
        return np.array([4.0 * (x[0] - 2.0) ** 3 + 2.0 * d, -4.0 * d])

    def component_value(self, i: int, x: np.ndarray) -> float:
        x = _check_dim(x, self.n)
        return self._base_value(x) + float(self.eps_sq[i]) * float(x @ x)

    def component_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        x = _check_dim(x, self.n)
        return self._base_gradient(x) + 2.0 * float(self.eps_sq[i]) * x

    def sample_value(self, indices: np.ndarray, x: np.ndarray) -> float:
        x = _check_dim(x, self.n)
        return self._base_value(x) + float(np.mean(self.eps_sq[indices])) * float(x @ x)

    def sample_gradient(self, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
        x = _check_dim(x, self.n)
        return self._base_gradient(x) + 2.0 * float(np.mean(self.eps_sq[indices])) * x

    def sample_value_and_gradient(self, indices, x):
        return self.sample_value(indices, x), self.sample_gradient(indices, x)


def hs24_noisy_problem(spec: NoisyHs24Spec) -> Hs24NoisyProblem:
    return Hs24NoisyProblem(spec)


def gaussian_normalized_init(n: int, seed: int) -> np.ndarray:
    """Unit-norm starting point from a normalized standard-normal draw."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    while True:
        z = rng.standard_normal(n)
        norm = float(np.linalg.norm(z))
        if norm > 0.0:
            return z / norm
