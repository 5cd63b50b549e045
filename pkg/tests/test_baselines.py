import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkmeans.baselines import (
    as_dense,
    cluster_with_baseline,
    kmeans_objective,
    nearest_cosine,
    nearest_euclidean,
    run_kmeans_baseline,
    run_spherical_kmeans_baseline,
)
from linkmeans.preprocess import SparseVector, l2_normalize


def unit_rows(M):
    return M / np.linalg.norm(M, axis=1, keepdims=True)


def best_partition_mse(X, k):
    """Smallest mean squared error over every assignment of rows to k labels."""
    n = len(X)
    best = np.inf
    for labels in itertools.product(range(k), repeat=n):
        labels = np.array(labels)
        if len(set(labels.tolist())) != k:
            continue
        total = 0.0
        for j in range(k):
            pts = X[labels == j]
            total += ((pts - pts.mean(axis=0)) ** 2).sum()
        best = min(best, total / n)
    return best


# --- Euclidean k-means ------------------------------------------------------------


def test_k1_centroid_is_mean():
    X = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]])
    state = run_kmeans_baseline(X, 1)
    np.testing.assert_allclose(state.centroids[0], X.mean(axis=0))
    assert state.converged


def test_k_equals_n_has_zero_error():
    X = np.random.default_rng(1).random((6, 3))
    state = run_kmeans_baseline(X, 6)
    assert state.objective == 0.0
    assert sorted(state.assignment.tolist()) == list(range(6))


def test_separated_blobs_reach_brute_force_optimum():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(0, 0.05, (4, 2)), rng.normal(5, 0.05, (4, 2))])
    state = run_kmeans_baseline(X, 2, rng_seed=0)
    assert state.objective == pytest.approx(best_partition_mse(X, 2), rel=1e-12)


def test_never_beats_brute_force_optimum():
    rng = np.random.default_rng(3)
    for trial in range(10):
        n = int(rng.integers(3, 9))
        k = int(rng.integers(1, min(n, 3) + 1))
        X = rng.random((n, 2))
        state = run_kmeans_baseline(X, k, rng_seed=trial)
        assert state.objective >= best_partition_mse(X, k) - 1e-12


def test_k_out_of_range_raises():
    X = np.eye(3)
    with pytest.raises(ValueError):
        run_kmeans_baseline(X, 4)
    with pytest.raises(ValueError):
        run_kmeans_baseline(X, 0)


def test_objective_recomputes():
    X = np.random.default_rng(4).random((30, 5))
    state = run_kmeans_baseline(X, 4, rng_seed=1)
    recomputed = kmeans_objective(X, state.centroids, state.assignment)
    assert abs(recomputed - state.objective) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.integers(1, 6))
def test_kmeans_history_nonincreasing(seed, n, k):
    k = min(k, n)
    X = np.random.default_rng(seed).random((n, 4))
    state = run_kmeans_baseline(X, k, rng_seed=seed)
    assert all(b <= a + 1e-12 for a, b in zip(state.history, state.history[1:]))


# --- spherical k-means ----------------------------------------------------------


def test_identical_docs_total_is_n():
    X = np.tile([0.6, 0.8, 0.0], (5, 1))
    state = run_spherical_kmeans_baseline(X, 1)
    assert state.objective == pytest.approx(5.0)


def test_orthogonal_groups_split():
    X = np.array([[1, 0.05, 0], [1, 0, 0.05], [0, 1, 0.05], [0.05, 1, 0]], dtype=float)
    state = run_spherical_kmeans_baseline(X, 2, rng_seed=0)
    a = state.assignment
    assert a[0] == a[1] and a[2] == a[3] and a[0] != a[2]


def test_spherical_rejects_zero_rows():
    with pytest.raises(ValueError):
        run_spherical_kmeans_baseline(np.array([[1.0, 0.0], [0.0, 0.0]]), 1)


def test_spherical_centroids_unit_norm():
    X = np.random.default_rng(5).random((20, 6))
    state = run_spherical_kmeans_baseline(X, 3)
    np.testing.assert_allclose(np.linalg.norm(state.centroids, axis=1), 1.0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.integers(1, 6))
def test_spherical_history_nondecreasing(seed, n, k):
    k = min(k, n)
    X = np.random.default_rng(seed).random((n, 4)) + 1e-3
    state = run_spherical_kmeans_baseline(X, k, rng_seed=seed)
    assert all(b >= a - 1e-12 for a, b in zip(state.history, state.history[1:]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(1, 8), st.integers(2, 10))
def test_unit_vectors_euclidean_and_cosine_agree(seed, n, k, dim):
    rng = np.random.default_rng(seed)
    X = unit_rows(rng.normal(size=(n, dim)))
    C = unit_rows(rng.normal(size=(k, dim)))
    assert np.array_equal(nearest_euclidean(X, C), nearest_cosine(X, C))


# --- wrapping as a ClusteringResult ---------------------------------------------------


def test_as_dense_from_sparse():
    vs = [SparseVector([0, 2], [1.0, 2.0]), SparseVector([1], [3.0])]
    np.testing.assert_array_equal(as_dense(vs), [[1, 0, 2], [0, 3, 0]])


def test_cluster_with_baseline_partition():
    vs = [l2_normalize(SparseVector([0, 1], [1.0, 0.1])), l2_normalize(SparseVector([0], [1.0])),
          SparseVector(), l2_normalize(SparseVector([2], [1.0])), l2_normalize(SparseVector([2, 3], [1.0, 0.2]))]
    for method in ("kmeans", "skmeans"):
        result = cluster_with_baseline(vs, method, 2, rng_seed=0)
        assert result.method == method
        assert 2 in result.miscellaneous
        assert sorted(c.members for c in result.clusters) == [(0, 1), (3, 4)]
        assert result.violations(0.0) == []


def test_cluster_with_baseline_unknown_method():
    with pytest.raises(ValueError):
        cluster_with_baseline([SparseVector([0], [1.0])], "dbscan", 1)
