"""Problem families, the sparse-format parser, and initialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aspen.problems import (
    DimensionMismatchError,
    LibsvmParseError,
    NoisyHs24Spec,
    SparseDataset,
    gaussian_normalized_init,
    hs24_noisy_problem,
    logistic_problem,
    parse_libsvm,
    serialize_libsvm,
)
from conftest import DATA_DIR, random_unit


def central_fd_gradient(fn, x, rel_step=1e-6):
    """Independent oracle: central finite differences, coordinate by coordinate."""
    step = rel_step * (1.0 + np.linalg.norm(x))
    g = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        g[j] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return g


def assert_gradient_matches(fn, grad, x, tol=1e-6):
    g = np.asarray(grad(x), dtype=float)
    g_fd = central_fd_gradient(fn, x)
    assert np.linalg.norm(g - g_fd) <= tol * (1.0 + np.linalg.norm(g))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def test_parse_two_rows():
    ds = parse_libsvm("+1 1:0.5 3:2.0\n-1 2:1.0")
    assert ds.n_rows == 2
    assert ds.n_features == 3
    assert [lab for lab, _ in ds.rows] == [1, -1]
    assert ds.rows[0][1] == [(1, 0.5), (3, 2.0)]


def test_parse_empty_input_rejected():
    with pytest.raises(LibsvmParseError, match="line 1"):
        parse_libsvm("")


def test_parse_accepts_bytes_and_blank_lines():
    ds = parse_libsvm(b"+1 1:1.0\n\n-1 1:2.0\n")
    assert ds.n_rows == 2


def test_parse_zero_one_labels_mapped():
    ds = parse_libsvm("0 1:1.0\n1 1:2.0")
    assert [lab for lab, _ in ds.rows] == [-1, 1]


def test_parse_one_two_labels_mapped():
    ds = parse_libsvm("1 1:1.0\n2 1:2.0")
    assert [lab for lab, _ in ds.rows] == [1, -1]


MALFORMED_CASES = [
    ("", 1, "empty"),
    ("abc 1:1.0", 1, "label"),
    ("+1 1:1.0\n-1 0:2.0", 2, "index"),
    ("+1 2:1.0 2:2.0", 1, "increasing"),
    ("+1 3:1.0 2:2.0", 1, "increasing"),
    ("+1 1:1.0\n+1 1:2:3", 2, "feature"),
    ("+1 1:abc", 1, "value"),
    ("3 1:1.0", 1, "label"),
    ("+1 1.5:1.0", 1, "index"),
    ("+1 1:1.0\n-1 2:1.0\n0 1:1.0", 3, "incompatible"),
    ("+1 1:nan", 1, "non-finite"),
]


@pytest.mark.parametrize("text,line,_hint", MALFORMED_CASES)
def test_malformed_inputs_rejected_with_line_numbers(text, line, _hint):
    with pytest.raises(LibsvmParseError) as err:
        parse_libsvm(text)
    assert err.value.line_no == line
    assert f"line {line}" in str(err.value)


def test_fixture_roundtrip():
    raw = (DATA_DIR / "parser_fixture.libsvm").read_text()
    ds = parse_libsvm(raw)
    assert ds.n_rows == 10
    again = parse_libsvm(serialize_libsvm(ds))
    assert again.n_features == ds.n_features
    assert again.rows == ds.rows  # every (index, value) pair survives exactly


@st.composite
def datasets(draw):
    n_rows = draw(st.integers(1, 6))
    rows = []
    for _ in range(n_rows):
        label = draw(st.sampled_from([-1, 1]))
        idxs = sorted(draw(st.sets(st.integers(1, 30), min_size=0, max_size=5)))
        vals = draw(
            st.lists(
                st.floats(
                    allow_nan=False, allow_infinity=False, width=64,
                    min_value=-1e12, max_value=1e12,
                ),
                min_size=len(idxs), max_size=len(idxs),
            )
        )
        rows.append((label, list(zip(idxs, vals))))
    n_features = max((feats[-1][0] for _, feats in rows if feats), default=0)
    return SparseDataset(rows=rows, n_features=n_features)


@given(datasets())
@settings(max_examples=100, deadline=None)
def test_parse_serialize_identity(ds):
    parsed = parse_libsvm(serialize_libsvm(ds))
    assert parsed.rows == ds.rows


# ---------------------------------------------------------------------------
# logistic problem
# ---------------------------------------------------------------------------


def test_logistic_value_at_origin_is_log2(tiny_logistic):
    x = np.zeros(tiny_logistic.n)
    for i in range(tiny_logistic.N):
        assert tiny_logistic.component_value(i, x) == pytest.approx(np.log(2.0), rel=1e-15)


def test_logistic_gradient_at_origin(tiny_logistic):
    x = np.zeros(tiny_logistic.n)
    for i in range(tiny_logistic.N):
        expected = -0.5 * tiny_logistic.b[i] * tiny_logistic.A[i]
        np.testing.assert_allclose(tiny_logistic.component_gradient(i, x), expected, rtol=1e-14)


def test_logistic_constraint_zero_on_sphere(tiny_logistic):
    rng = np.random.default_rng(5)
    x = random_unit(tiny_logistic.n, rng)
    assert tiny_logistic.constraint_value(x)[0] == pytest.approx(0.0, abs=1e-14)


def test_logistic_value_finite_for_huge_margins(tiny_logistic):
    x = np.full(tiny_logistic.n, 1e4)
    for i in range(tiny_logistic.N):
        assert np.isfinite(tiny_logistic.component_value(i, x))
    assert np.isfinite(tiny_logistic.sample_value(np.arange(tiny_logistic.N), -x))


def test_logistic_dimension_mismatch(tiny_logistic):
    with pytest.raises(DimensionMismatchError):
        tiny_logistic.component_value(0, np.zeros(tiny_logistic.n + 1))


def test_logistic_sample_matches_component_mean(tiny_logistic):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(tiny_logistic.n)
    idx = np.array([0, 2, 4])
    manual = np.mean([tiny_logistic.component_value(i, x) for i in idx])
    assert tiny_logistic.sample_value(idx, x) == pytest.approx(manual, rel=1e-14)
    manual_g = sum(tiny_logistic.component_gradient(i, x) for i in idx) / 3
    np.testing.assert_allclose(tiny_logistic.sample_gradient(idx, x), manual_g, rtol=1e-13)


def test_logistic_component_gradients_match_fd(tiny_logistic):
    rng = np.random.default_rng(42)
    for _ in range(100):
        x = rng.standard_normal(tiny_logistic.n)
        i = int(rng.integers(tiny_logistic.N))
        assert_gradient_matches(
            lambda y: tiny_logistic.component_value(i, y),
            lambda y: tiny_logistic.component_gradient(i, y),
            x,
        )


def test_scale_rows_normalizes_features(tiny_dataset):
    p = logistic_problem(tiny_dataset, scale_rows=True)
    norms = np.linalg.norm(p.A, axis=1)
    np.testing.assert_allclose(norms, 1.0, rtol=1e-12)


# ---------------------------------------------------------------------------
# noisy 2-D problem
# ---------------------------------------------------------------------------


def test_hs24_noise_free_values():
    prob = hs24_noisy_problem(NoisyHs24Spec(N=7, sigma=0.0, seed=0))
    assert prob.sample_value(np.arange(7), np.array([2.0, 1.0])) == 0.0
    assert prob.sample_value(np.arange(7), np.array([0.0, 0.0])) == 16.0


def test_hs24_noisy_value_against_summation_loop():
    spec = NoisyHs24Spec(N=50, sigma=1.0, seed=123)
    prob = hs24_noisy_problem(spec)
    x = np.array([1.0, 0.0])
    # independent oracle: plain python summation over the stored noise draw
    total = 0.0
    for i in range(spec.N):
        total += (x[0] - 2.0) ** 4 + (x[0] - 2.0 * x[1]) ** 2 + spec.noise[i] ** 2 * (x @ x)
    expected = total / spec.N
    assert prob.sample_value(np.arange(spec.N), x) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.0 + 1.0 + np.mean(spec.noise**2), rel=1e-14)


def test_hs24_noise_frozen_at_construction():
    a = NoisyHs24Spec(N=10, sigma=0.5, seed=9)
    b = NoisyHs24Spec(N=10, sigma=0.5, seed=9)
    np.testing.assert_array_equal(a.noise, b.noise)
    prob = hs24_noisy_problem(a)
    x = np.array([0.3, -0.4])
    assert prob.component_value(3, x) == prob.component_value(3, x)


def test_hs24_component_gradients_match_fd():
    prob = hs24_noisy_problem(NoisyHs24Spec(N=20, sigma=0.7, seed=2))
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.standard_normal(2)
        i = int(rng.integers(prob.N))
        assert_gradient_matches(
            lambda y: prob.component_value(i, y),
            lambda y: prob.component_gradient(i, y),
            x,
        )


def test_hs24_validation():
    with pytest.raises(ValueError):
        NoisyHs24Spec(N=0, sigma=1.0, seed=0)
    with pytest.raises(ValueError):
        NoisyHs24Spec(N=5, sigma=-1.0, seed=0)


# ---------------------------------------------------------------------------
# sphere constraint contract
# ---------------------------------------------------------------------------


def test_sphere_jtv_unit_multiplier_is_2x(tiny_logistic):
    rng = np.random.default_rng(3)
    x = rng.standard_normal(tiny_logistic.n)
    np.testing.assert_array_equal(tiny_logistic.constraint_jtv(x, np.array([1.0])), 2.0 * x)


@given(
    st.floats(-10, 10), st.floats(-10, 10),
    st.integers(0, 2**31 - 1),
)
@settings(max_examples=50, deadline=None)
def test_sphere_jtv_linear_in_multiplier(a, b, seed):
    prob = hs24_noisy_problem(NoisyHs24Spec(N=3, sigma=0.2, seed=1))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(2)
    lhs = prob.constraint_jtv(x, np.array([a + b]))
    rhs = prob.constraint_jtv(x, np.array([a])) + prob.constraint_jtv(x, np.array([b]))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------


def test_init_unit_norm_and_deterministic():
    for seed in range(20):
        x = gaussian_normalized_init(6, seed)
        assert abs(np.linalg.norm(x) - 1.0) <= 1e-12
    np.testing.assert_array_equal(
        gaussian_normalized_init(6, 33), gaussian_normalized_init(6, 33)
    )


def test_init_rotational_symmetry_monte_carlo():
    # oracle: empirical mean over many seeds should sit near the origin
    xs = np.array([gaussian_normalized_init(2, seed) for seed in range(10_000)])
    mean = xs.mean(axis=0)
    assert np.all(np.abs(mean) < 0.05)


def test_init_rejects_bad_dimension():
    with pytest.raises(ValueError):
        gaussian_normalized_init(0, 1)
