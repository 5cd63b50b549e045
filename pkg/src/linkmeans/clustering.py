"""Threshold-gated cosine assignment of documents to link-derived centroids.

Seed groups from :mod:`linkmeans.seeding` become the first centroids. Every
other document, in doc id order, joins its most similar centroid when the
cosine similarity reaches ``alpha``; otherwise it founds a new centroid of
its own. Centroids are re-normalized sums of their members after every
accepted assignment. Clusters left with a single document are pooled into a
"miscellaneous" group at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus
from .preprocess import SparseVector, Vocabulary, l2_normalize, sum_vectors, vectorize_texts
from .stopwords import ENGLISH_STOPWORDS
from .seeding import SeedGroups, build_seed_centroids, seed_groups

__all__ = [
    "EmptyVectorError",
    "ClusterParams",
    "Centroid",
    "CentroidSet",
    "Cluster",
    "ClusteringResult",
    "cosine_similarity",
    "update_centroid",
    "seed_centroid_set",
    "assign_documents",
    "run_linked_kmeans",
    "top_terms",
]

SEED = "seed"
SPAWNED = "spawned"
NORM_TOL = 1e-9


class EmptyVectorError(ValueError):
    """A document has no weighted terms left after preprocessing."""


@dataclass(frozen=True)
class ClusterParams:
    alpha: float = 0.5
    max_passes: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.max_passes < 1:
            raise ValueError(f"max_passes must be positive, got {self.max_passes}")


@dataclass
class Centroid:
    centroid_id: int
    vector: SparseVector
    members: list[int]
    origin: str
    member_vectors: list[SparseVector] = field(default_factory=list, repr=False)


class CentroidSet:
    """Ordered centroids; ids equal list positions."""

    def __init__(self, centroids: Sequence[Centroid] = ()):
        self.centroids = list(centroids)

    def __iter__(self):
        return iter(self.centroids)

    def __len__(self):
        return len(self.centroids)

    def __getitem__(self, i) -> Centroid:
        return self.centroids[i]

    def spawn(self, doc_id: int, vector: SparseVector) -> Centroid:
        c = Centroid(len(self.centroids), vector, [doc_id], SPAWNED, [vector])
        self.centroids.append(c)
        return c


@dataclass(frozen=True)
class Cluster:
    centroid_id: int
    members: tuple[int, ...]
    origin: str = SEED


@dataclass
class ClusteringResult:
    n_docs: int
    clusters: list[Cluster]
    miscellaneous: frozenset[int]
    similarities: dict[int, float] = field(default_factory=dict)
    seeded: frozenset[int] = frozenset()
    k_seed: int = 0
    method: str = "linked"
    centroids: CentroidSet | None = None
    vocabulary: Vocabulary | None = None
    seeds: SeedGroups | None = None

    @property
    def k_final(self) -> int:
        return len(self.clusters)

    @property
    def assignment(self) -> dict[int, int | None]:
        """doc id -> centroid id, or ``None`` for the miscellaneous group."""
        out: dict[int, int | None] = {d: None for d in self.miscellaneous}
        for cluster in self.clusters:
            for d in cluster.members:
                out[d] = cluster.centroid_id
        return out

    @property
    def clustered_count(self) -> int:
        return sum(len(c.members) for c in self.clusters)

    def violations(self, alpha: float | None = None) -> list[str]:
        """Broken invariants, empty when the result is sound.

        Checks that clusters and the miscellaneous group partition all doc
        ids, that centroids are unit vectors, and (given ``alpha``) that every
        clustered document outside the seed groups met the threshold.
        """
        problems = []
        seen: dict[int, int] = {}
        for cluster in self.clusters:
            for d in cluster.members:
                seen[d] = seen.get(d, 0) + 1
        for d in self.miscellaneous:
            seen[d] = seen.get(d, 0) + 1
        dup = sorted(d for d, cnt in seen.items() if cnt > 1)
        if dup:
            problems.append(f"documents in more than one group: {dup}")
        if set(seen) != set(range(self.n_docs)):
            missing = sorted(set(range(self.n_docs)) - set(seen))
            extra = sorted(set(seen) - set(range(self.n_docs)))
            problems.append(f"not a partition of doc ids: missing={missing} extra={extra}")
        if self.centroids is not None:
            for c in self.centroids:
                if c.members and abs(c.vector.norm - 1.0) > NORM_TOL:
                    problems.append(f"centroid {c.centroid_id} has norm {c.vector.norm!r}")
        if alpha is not None:
            for cluster in self.clusters:
                for d in cluster.members:
                    if d not in self.seeded and self.similarities.get(d, -math.inf) < alpha:
                        problems.append(f"document {d} joined below threshold ({self.similarities.get(d)})")
        return problems


def cosine_similarity(a: SparseVector, b: SparseVector) -> float:
    if a.is_empty or b.is_empty:
        raise EmptyVectorError("cosine similarity of an empty vector")
    return a.dot(b) / (a.norm * b.norm)


def update_centroid(centroid: Centroid, doc_id: int, vector: SparseVector) -> Centroid:
    """Add a member and recompute the centroid from all member vectors."""
    if vector.is_empty:
        raise EmptyVectorError(f"document {doc_id} has an empty vector")
    centroid.members.append(doc_id)
    centroid.member_vectors.append(vector)
    centroid.vector = l2_normalize(sum_vectors(centroid.member_vectors))
    return centroid


def seed_centroid_set(seeds: SeedGroups, vectors: Sequence[SparseVector]) -> tuple[SeedGroups, CentroidSet]:
    """Centroids for the seed groups. Members with empty vectors are left out."""
    seeds, vecs = build_seed_centroids(seeds, vectors)
    centroids = []
    for cid, (group, vec) in enumerate(zip(seeds.groups, vecs)):
        members = [d for d in group if not vectors[d].is_empty]
        centroids.append(Centroid(cid, vec, members, SEED, [vectors[d] for d in members]))
    return seeds, CentroidSet(centroids)


def _best(vector, centroids):
    best_id, best_sim = None, -math.inf
    for c in centroids:
        if not c.members:
            continue
        sim = cosine_similarity(vector, c.vector)
        if sim > best_sim:
            best_id, best_sim = c.centroid_id, sim
    return best_id, best_sim


def assign_documents(
    vectors: Sequence[SparseVector],
    seeds: CentroidSet,
    params: ClusterParams = ClusterParams(),
) -> tuple[CentroidSet, ClusteringResult]:
    """Assign every non-seed document; see the module docstring for the rule.

    ``seeds`` is copied, not modified.
    """
    n = len(vectors)
    centroids = CentroidSet(
        Centroid(c.centroid_id, c.vector, list(c.members), c.origin, list(c.member_vectors)) for c in seeds
    )
    seeded = frozenset(d for c in centroids for d in c.members)
    misc: set[int] = set()
    sims: dict[int, float] = {}

    for c in centroids:
        for d, vec in zip(c.members, c.member_vectors):
            sims[d] = cosine_similarity(vec, c.vector)

    for d in range(n):
        if d in seeded:
            continue
        vec = vectors[d]
        if vec.is_empty:
            misc.add(d)
            continue
        cid, sim = _best(vec, centroids)
        if cid is not None and sim >= params.alpha:
            update_centroid(centroids[cid], d, vec)
            sims[d] = sim
        else:
            centroids.spawn(d, vec)
            sims[d] = 1.0

    for _ in range(params.max_passes - 1):
        _refine(vectors, centroids, seeded, misc, sims, params.alpha)

    clusters = []
    for c in centroids:
        if len(c.members) == 1:
            misc.update(c.members)
        elif c.members:
            clusters.append(Cluster(c.centroid_id, tuple(sorted(c.members)), c.origin))

    result = ClusteringResult(
        n_docs=n,
        clusters=clusters,
        miscellaneous=frozenset(misc),
        similarities=sims,
        seeded=seeded,
        k_seed=len(seeds),
        centroids=centroids,
    )
    return centroids, result


def _refine(vectors, centroids, seeded, misc, sims, alpha):
    # Batch pass over every clustered document against frozen centroids.
    # Non-seed documents that fall below alpha go to the miscellaneous group.
    moves: dict[int, list[int]] = {c.centroid_id: [] for c in centroids}
    for c in centroids:
        for d in c.members:
            cid, sim = _best(vectors[d], centroids)
            if d in seeded or sim >= alpha:
                moves[cid].append(d)
                sims[d] = sim
            else:
                misc.add(d)
                sims.pop(d, None)
    for c in centroids:
        members = sorted(moves[c.centroid_id])
        c.members = members
        c.member_vectors = [vectors[d] for d in members]
        if members:
            c.vector = l2_normalize(sum_vectors(c.member_vectors))


def run_linked_kmeans(
    corpus: Corpus, params: ClusterParams = ClusterParams(), stoplist=ENGLISH_STOPWORDS
) -> ClusteringResult:
    """Preprocess, seed from links, and assign. Deterministic."""
    documents, adjacency, _ = corpus
    vocab, vectors = vectorize_texts([doc.text for doc in documents], stoplist)
    seeds, initial = seed_centroid_set(seed_groups(adjacency), vectors)
    _, result = assign_documents(vectors, initial, params)
    result.vocabulary = vocab
    result.seeds = seeds
    return result


def top_terms(vector: SparseVector, vocab: Vocabulary, count: int = 10) -> list[str]:
    """Highest-weighted terms of a centroid, ties broken alphabetically."""
    terms = vocab.terms
    ranked = sorted(vector.items(), key=lambda item: (-item[1], terms[item[0]]))
    return [terms[tid] for tid, _ in ranked[:count]]
