import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from recombination import build_coreset, moment_features, reduce_deterministic, solve_reduced
from recombination.datasets import synthetic_regression
from recombination.errors import RankDeficient
from recombination.lsq import LsqCoreset, feature_dimension, normal_matrix_error, residual


class TestFeatures:
    def test_pair(self):
        np.testing.assert_array_equal(moment_features([2.0, 3.0]), [4.0, 6.0, 9.0])

    def test_dimension(self):
        assert feature_dimension(2) == 6
        assert moment_features(np.ones(3)).shape == (6,)

    def test_zero(self):
        np.testing.assert_array_equal(moment_features(np.zeros(3)), np.zeros(6))

    def test_rows(self):
        Z = np.arange(6.0).reshape(2, 3)
        np.testing.assert_array_equal(moment_features(Z)[1], moment_features(Z[1]))


class TestCoreset:
    def test_tiny_passthrough(self):
        X, Y, _ = synthetic_regression(7, 2, 0)
        cs = build_coreset(X, Y)
        np.testing.assert_array_equal(cs.row_indices, np.arange(7))
        np.testing.assert_array_equal(cs.row_scales, np.ones(7))

    def test_gaussian(self):
        X, Y, _ = synthetic_regression(10_000, 2, 1)
        cs = build_coreset(X, Y, seed=1)
        assert cs.row_indices.size <= 7
        assert normal_matrix_error(X, Y, cs) <= 1e-8

    def test_residual_identity(self):
        X, Y, _ = synthetic_regression(10_000, 3, 2)
        cs = build_coreset(X, Y, seed=2)
        Xs, Ys = cs.apply(X, Y)
        rng = np.random.default_rng(2)
        for _ in range(20):
            w = rng.standard_normal(3) * 3
            full, small = residual(X, Y, w), residual(Xs, Ys, w)
            assert abs(full - small) <= 1e-6 * full

    def test_callable_reducer(self):
        X, Y, _ = synthetic_regression(2000, 2, 3)
        cs = build_coreset(X, Y, reducer=lambda m, seed: reduce_deterministic(m))
        assert cs.reduction.method == "deterministic"
        assert normal_matrix_error(X, Y, cs) <= 1e-8


class TestSolveReduced:
    def test_exact_fit(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((5000, 3))
        theta = np.array([1.5, -2.0, 0.25])
        Y = X @ theta
        np.testing.assert_allclose(solve_reduced(X, Y, build_coreset(X, Y)), theta, atol=1e-8)

    def test_matches_full_solve(self):
        X, Y, _ = synthetic_regression(20_000, 2, 5)
        full = np.linalg.lstsq(X, Y, rcond=None)[0]
        small = solve_reduced(X, Y, build_coreset(X, Y, seed=5))
        np.testing.assert_allclose(small, full, rtol=1e-6)

    def test_scalar_slope(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(3000)
        y = 0.7 * x + rng.standard_normal(3000)
        cs = build_coreset(x, y, seed=6)
        xs, ys = cs.apply(x[:, None], y)
        assert (xs[:, 0] @ ys) / (xs[:, 0] @ xs[:, 0]) == pytest.approx((x @ y) / (x @ x), rel=1e-9)
        assert solve_reduced(x, y, cs)[0] == pytest.approx((x @ y) / (x @ x), rel=1e-9)

    def test_rank_deficient(self):
        X = np.ones((10, 2))
        cs = LsqCoreset(np.arange(3), np.ones(3))
        with pytest.raises(RankDeficient):
            solve_reduced(X, np.ones(10), cs)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(30, 600))
def test_normal_equations_preserved(seed, d, N):
    X, Y, _ = synthetic_regression(N, d, seed)
    cs = build_coreset(X, Y, seed=seed)
    assert cs.row_indices.size <= feature_dimension(d) + 1
    assert normal_matrix_error(X, Y, cs) <= 1e-8
