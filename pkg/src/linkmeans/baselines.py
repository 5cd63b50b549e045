"""Classic (Euclidean) and spherical k-means, used as comparison baselines.

Both run batch Lloyd iterations on dense arrays from ``k`` distinct random
documents and record the objective after every assignment step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clustering import Cluster, ClusteringResult
from .preprocess import SparseVector

__all__ = [
    "KMeansState",
    "as_dense",
    "nearest_euclidean",
    "nearest_cosine",
    "kmeans_objective",
    "run_kmeans_baseline",
    "run_spherical_kmeans_baseline",
    "to_clustering_result",
    "cluster_with_baseline",
]


@dataclass
class KMeansState:
    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    objective: float
    history: list[float] = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False


def as_dense(vectors, dim: int | None = None) -> np.ndarray:
    """Stack sparse vectors (or pass a 2-D array through) as float rows."""
    if isinstance(vectors, np.ndarray):
        return np.asarray(vectors, dtype=np.float64)
    vectors = list(vectors)
    if dim is None:
        dim = 1 + max((int(v.indices[-1]) for v in vectors if not v.is_empty), default=-1)
    out = np.zeros((len(vectors), dim))
    for row, v in enumerate(vectors):
        out[row, v.indices] = v.weights
    return out


def _sq_distances(X, C):
    # ||x||^2 + ||c||^2 - 2 x.c, clipped at zero against rounding
    d = (X * X).sum(1)[:, None] + (C * C).sum(1)[None, :] - 2.0 * X @ C.T
    return np.maximum(d, 0.0)


def nearest_euclidean(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Index of the nearest centroid per row; ties go to the lowest index."""
    return np.argmin(_sq_distances(X, C), axis=1)


def nearest_cosine(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Index of the most cosine-similar centroid per row."""
    xn = np.linalg.norm(X, axis=1)[:, None]
    cn = np.linalg.norm(C, axis=1)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where((xn > 0) & (cn > 0), (X @ C.T) / (xn * cn), 0.0)
    return np.argmax(sims, axis=1)


def kmeans_objective(X: np.ndarray, C: np.ndarray, assignment: np.ndarray) -> float:
    """Mean squared Euclidean distance of each point to its assigned centroid."""
    if len(X) == 0:
        return 0.0
    diff = X - C[assignment]
    return float(np.einsum("ij,ij->", diff, diff) / len(X))


def _init_centroids(X, k, rng_seed):
    n = len(X)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available vectors")
    rng = np.random.default_rng(rng_seed)
    return X[rng.choice(n, size=k, replace=False)].copy()


def run_kmeans_baseline(vectors, k: int, max_iter: int = 100, rng_seed: int | None = 0) -> KMeansState:
    """Lloyd's algorithm minimizing the mean squared error.

    A cluster that loses all its points keeps its previous centroid.
    """
    X = as_dense(vectors)
    C = _init_centroids(X, k, rng_seed)
    history, prev = [], None
    assignment = np.zeros(len(X), dtype=np.int64)
    converged = False
    for it in range(1, max_iter + 1):
        assignment = nearest_euclidean(X, C)
        history.append(kmeans_objective(X, C, assignment))
        if prev is not None and np.array_equal(assignment, prev):
            converged = True
            break
        counts = np.bincount(assignment, minlength=k)
        sums = np.zeros_like(C)
        np.add.at(sums, assignment, X)
        nonempty = counts > 0
        C[nonempty] = sums[nonempty] / counts[nonempty, None]
        prev = assignment
    else:
        it = max_iter
    return KMeansState(k, C, assignment, history[-1], history, it, converged)


def _normalize_rows(M):
    norms = np.linalg.norm(M, axis=1)
    out = M.copy()
    nz = norms > 0
    out[nz] /= norms[nz, None]
    return out


def run_spherical_kmeans_baseline(
    vectors, k: int, max_iter: int = 100, rng_seed: int | None = 0
) -> KMeansState:
    """Spherical k-means: cosine assignment, normalized-sum centroids.

    The objective is the total cosine similarity of points to their
    centroids. A cluster left empty is re-seeded with the point that is
    least similar to its current centroid.
    """
    X = as_dense(vectors)
    if np.any(np.linalg.norm(X, axis=1) == 0):
        raise ValueError("spherical k-means needs non-empty vectors")
    X = _normalize_rows(X)
    C = _init_centroids(X, k, rng_seed)
    history, prev = [], None
    assignment = np.zeros(len(X), dtype=np.int64)
    converged = False
    for it in range(1, max_iter + 1):
        sims = X @ C.T
        assignment = np.argmax(sims, axis=1)
        point_sims = sims[np.arange(len(X)), assignment]
        history.append(float(point_sims.sum()))
        if prev is not None and np.array_equal(assignment, prev):
            converged = True
            break
        sums = np.zeros_like(C)
        np.add.at(sums, assignment, X)
        counts = np.bincount(assignment, minlength=k)
        for j in np.flatnonzero(counts == 0):
            far = int(np.argmin(point_sims))
            sums[j] = X[far]
            point_sims[far] = np.inf
        nz = np.linalg.norm(sums, axis=1) > 0
        C[nz] = _normalize_rows(sums[nz])
        prev = assignment
    else:
        it = max_iter
    return KMeansState(k, C, assignment, history[-1], history, it, converged)


def to_clustering_result(
    state: KMeansState,
    doc_ids: Sequence[int],
    n_docs: int,
    method: str,
    similarities: dict[int, float] | None = None,
) -> ClusteringResult:
    """Express a baseline run over ``doc_ids`` as a partition of all documents.

    Documents not in ``doc_ids`` (no usable text) and one-member clusters go
    to the miscellaneous group, as in the linked method.
    """
    groups: dict[int, list[int]] = {}
    for doc, j in zip(doc_ids, state.assignment.tolist()):
        groups.setdefault(j, []).append(doc)
    clustered = set(doc_ids)
    misc = set(range(n_docs)) - clustered
    clusters = []
    for j in sorted(groups):
        members = sorted(groups[j])
        if len(members) == 1:
            misc.update(members)
        else:
            clusters.append(Cluster(j, tuple(members), "seed"))
    return ClusteringResult(
        n_docs=n_docs,
        clusters=clusters,
        miscellaneous=frozenset(misc),
        similarities=similarities or {},
        k_seed=state.k,
        method=method,
    )


def cluster_with_baseline(
    vectors: Sequence[SparseVector],
    method: str,
    k: int,
    rng_seed: int | None = 0,
    max_iter: int = 100,
    dim: int | None = None,
) -> ClusteringResult:
    """Run ``"kmeans"`` or ``"skmeans"`` over the documents with usable text."""
    runners = {"kmeans": run_kmeans_baseline, "skmeans": run_spherical_kmeans_baseline}
    if method not in runners:
        raise ValueError(f"unknown baseline {method!r}; expected one of {sorted(runners)}")
    doc_ids = [i for i, v in enumerate(vectors) if not v.is_empty]
    X = as_dense([vectors[i] for i in doc_ids], dim)
    state = runners[method](X, k, max_iter, rng_seed)
    C = _normalize_rows(state.centroids)
    own = C[state.assignment]
    cos = np.einsum("ij,ij->i", _normalize_rows(X), own)
    sims = {d: float(s) for d, s in zip(doc_ids, cos)}
    return to_clustering_result(state, doc_ids, len(vectors), method, sims)
