import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from recombination import DiscreteMeasure, reduce_deterministic, validate_reduction
from recombination.deterministic import eliminate, kernel_vector
from recombination.measure import center
from recombination.oracle import enumerate_solutions

from conftest import gaussian_measure


def test_kernel_vector_of_three_points():
    v = kernel_vector(np.array([[-1.0], [0.0], [1.0]]))
    np.testing.assert_allclose(v, np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0), atol=1e-12)


def test_hand_elimination():
    m = DiscreteMeasure.uniform([[-1.0], [0.0], [1.0]])
    sol = reduce_deterministic(m)
    # w - t v with v = (1, -2, 1) and t = 1/3 empties both ends
    np.testing.assert_array_equal(sol.indices, [1])
    np.testing.assert_allclose(sol.weights, [1.0])
    assert validate_reduction(m, sol).passed


def test_small_input_unchanged(triangle):
    sol = reduce_deterministic(triangle)
    np.testing.assert_array_equal(sol.indices, [0, 1, 2])
    np.testing.assert_allclose(sol.weights, [1 / 3, 1 / 3, 1 / 3])
    assert sol.method == "trivial"


def test_triangle_with_extra_point_reduces_to_oracle_support():
    m = DiscreteMeasure.uniform([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0], [0.2, -0.3]])
    sol = reduce_deterministic(m)
    supports = {idx for idx, _ in enumerate_solutions(center(m))}
    assert tuple(sol.indices.tolist()) in supports
    assert validate_reduction(m, sol).passed


def test_support_shrinks_each_step():
    rng = np.random.default_rng(0)
    points = rng.standard_normal((12, 3))
    weights = np.full(12, 1 / 12)
    points = points - weights @ points
    alive = []
    w = weights.copy()
    while np.count_nonzero(w) > 4:
        before = np.count_nonzero(w)
        w_next = eliminate(points, w)
        alive.append((before, np.count_nonzero(w_next)))
        w = w_next
    assert all(after < before for before, after in alive)


def test_rank_deficient_cloud():
    m = gaussian_measure(5000, 6, 3)
    pts = np.array(m.points)
    pts[:, 5] = pts[:, 0]
    m = DiscreteMeasure(pts, m.weights)
    sol = reduce_deterministic(m)
    assert validate_reduction(m, sol).passed


def test_block_sizes_agree_on_validity():
    m = gaussian_measure(3000, 5, 4)
    for block in (7, 12, 50, 3000):
        assert validate_reduction(m, reduce_deterministic(m, block=block)).passed


def test_deterministic_output():
    m = gaussian_measure(2000, 4, 8)
    a, b = reduce_deterministic(m), reduce_deterministic(m)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.weights, b.weights)


@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(2, 10))
def test_agrees_with_oracle(seed, n, extra):
    m = gaussian_measure(n + 1 + extra, n, seed)
    m = DiscreteMeasure(m.points, m.weights)
    sol = reduce_deterministic(m)
    assert validate_reduction(m, sol).passed
    if m.N <= 12:
        supports = {idx for idx, _ in enumerate_solutions(center(m))}
        assert tuple(sol.indices.tolist()) in supports
