import json
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkmeans.clustering import (
    Centroid,
    CentroidSet,
    ClusterParams,
    EmptyVectorError,
    assign_documents,
    cosine_similarity,
    run_linked_kmeans,
    seed_centroid_set,
    top_terms,
    update_centroid,
)
from linkmeans.corpus import LinkAdjacency, parse_corpus_lines
from linkmeans.preprocess import SparseVector, l2_normalize, vectorize_texts
from linkmeans.seeding import seed_groups
from linkmeans.synth import planted_spec, synth_corpus


def vec(*weights):
    return SparseVector(range(len(weights)), weights)


def unit(*weights):
    return l2_normalize(vec(*weights))


def make_corpus(texts, edges=(), labels=None):
    lines = []
    for i, text in enumerate(texts):
        rec = {"url": f"http://doc{i}.example/", "text": text,
               "outlinks": [f"http://doc{j}.example/" for a, j in edges if a == i]}
        if labels is not None:
            rec["label"] = labels[i]
        lines.append(json.dumps(rec))
    return parse_corpus_lines(lines)


def empty_seeds():
    return CentroidSet()


# --- cosine similarity ------------------------------------------------------------


def test_cosine_identical():
    v = unit(0.2, 0.5, 0.1)
    assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_disjoint():
    assert cosine_similarity(SparseVector([0, 1], [1, 2]), SparseVector([2, 3], [3, 4])) == 0.0


def test_cosine_hand_value():
    # dot = 1, |a||b| = sqrt(2) * sqrt(2) = 2
    assert cosine_similarity(vec(1, 1, 0), vec(0, 1, 1)) == pytest.approx(0.5)


def test_cosine_empty_raises():
    with pytest.raises(EmptyVectorError):
        cosine_similarity(SparseVector(), vec(1.0))


@settings(max_examples=200)
@given(
    st.dictionaries(st.integers(0, 20), st.floats(1e-3, 1e3), min_size=1, max_size=10),
    st.dictionaries(st.integers(0, 20), st.floats(1e-3, 1e3), min_size=1, max_size=10),
)
def test_cosine_range_and_dense_agreement(a, b):
    va, vb = SparseVector.from_dict(a), SparseVector.from_dict(b)
    sim = cosine_similarity(va, vb)
    da, db = va.to_dense(21), vb.to_dense(21)
    assert -1e-12 <= sim <= 1 + 1e-12
    assert sim == pytest.approx(da @ db / (np.linalg.norm(da) * np.linalg.norm(db)), abs=1e-12)


# --- update_centroid --------------------------------------------------------------


def test_update_one_member_is_member():
    v = unit(3, 4)
    c = Centroid(0, SparseVector(), [], "seed", [])
    update_centroid(c, 7, v)
    assert c.members == [7]
    np.testing.assert_allclose(c.vector.weights, v.weights)


def test_update_orthogonal_members():
    c = Centroid(0, unit(1, 0), [0], "seed", [unit(1, 0)])
    update_centroid(c, 1, unit(0, 1))
    np.testing.assert_allclose(c.vector.to_dense(2), [1 / math.sqrt(2)] * 2)


def test_update_with_equal_vector_is_stable():
    v = unit(1, 2, 3)
    c = Centroid(0, v, [0], "seed", [v])
    update_centroid(c, 1, v)
    np.testing.assert_allclose(c.vector.weights, v.weights, atol=1e-9)


def test_update_recomputes_from_all_members():
    a, b, d = unit(1, 0, 0), unit(0, 1, 0), unit(0, 0, 1)
    c = Centroid(0, a, [0], "seed", [a])
    update_centroid(c, 1, b)
    update_centroid(c, 2, d)
    # normalized sum of all three, not normalize(previous centroid + d)
    np.testing.assert_allclose(c.vector.to_dense(3), [1 / math.sqrt(3)] * 3)


def test_update_empty_raises():
    with pytest.raises(EmptyVectorError):
        update_centroid(Centroid(0, unit(1), [0], "seed", [unit(1)]), 1, SparseVector())


# --- assign_documents --------------------------------------------------------------


def test_doc_identical_to_seed_joins_it():
    seed = unit(1, 1, 0)
    seeds = CentroidSet([Centroid(0, seed, [0], "seed", [seed])])
    _, result = assign_documents([seed, seed], seeds)
    assert result.clusters[0].members == (0, 1)
    assert result.similarities[1] == pytest.approx(1.0)


def test_orthogonal_doc_spawns_then_lands_in_misc():
    seed = unit(1, 0, 0)
    seeds = CentroidSet([Centroid(0, seed, [0, 1], "seed", [seed, seed])])
    centroids, result = assign_documents([seed, seed, unit(0, 0, 1)], seeds)
    assert len(centroids) == 2 and centroids[1].origin == "spawned"
    assert result.miscellaneous == {2}
    assert result.clusters[0].members == (0, 1)


def test_edgeless_identical_pair_forms_cluster():
    v = unit(2, 1)
    centroids, result = assign_documents([v, v], empty_seeds())
    assert len(centroids) == 1
    assert [(c.centroid_id, c.members, c.origin) for c in result.clusters] == [(0, (0, 1), "spawned")]
    assert result.miscellaneous == frozenset()


def test_empty_vectors_go_to_misc():
    v = unit(1, 1)
    _, result = assign_documents([SparseVector(), v, v], empty_seeds())
    assert result.miscellaneous == {0}


def test_alpha_boundary_is_inclusive():
    # cos((1,1,0), (0,1,1)) == 0.5 exactly
    a, b = vec(1, 1, 0), vec(0, 1, 1)
    a, b = SparseVector(a.indices, a.weights / math.sqrt(2)), SparseVector(b.indices, b.weights / math.sqrt(2))
    _, result = assign_documents([a, b], empty_seeds(), ClusterParams(alpha=0.5))
    if cosine_similarity(a, b) >= 0.5:
        assert result.k_final == 1
    _, strict = assign_documents([a, b], empty_seeds(), ClusterParams(alpha=0.51))
    assert strict.k_final == 0 and strict.miscellaneous == {0, 1}


def test_ties_go_to_lowest_centroid():
    a, b = unit(1, 0), unit(0, 1)
    seeds = CentroidSet([
        Centroid(0, a, [0, 1], "seed", [a, a]),
        Centroid(1, b, [2, 3], "seed", [b, b]),
    ])
    _, result = assign_documents([a, a, b, b, unit(1, 1)], seeds, ClusterParams(alpha=0.5))
    assert result.assignment[4] == 0


def test_seeds_not_modified():
    a = unit(1, 0)
    seeds = CentroidSet([Centroid(0, a, [0, 1], "seed", [a, a])])
    assign_documents([a, a, unit(1, 0.1)], seeds)
    assert seeds[0].members == [0, 1]


def test_params_validation():
    with pytest.raises(ValueError):
        ClusterParams(alpha=1.5)
    with pytest.raises(ValueError):
        ClusterParams(max_passes=0)


@st.composite
def vector_sets(draw):
    n = draw(st.integers(1, 15))
    out = []
    for _ in range(n):
        d = draw(st.dictionaries(st.integers(0, 8), st.floats(0.01, 5.0), max_size=4))
        out.append(l2_normalize(SparseVector.from_dict(d)))
    return out


@settings(max_examples=150, deadline=None)
@given(vector_sets(), st.floats(0.0, 1.0), st.integers(1, 3))
def test_assignment_invariants(vectors, alpha, passes):
    n = len(vectors)
    edges = [(i, i + 1) for i in range(0, n - 1, 3)]
    seeds, initial = seed_centroid_set(seed_groups(LinkAdjacency.from_pairs(n, edges)), vectors)
    centroids, result = assign_documents(vectors, initial, ClusterParams(alpha, passes))
    assert result.violations(alpha) == []
    assert all(len(c.members) >= 2 for c in result.clusters)
    assert set(result.assignment) == set(range(n))


# --- run_linked_kmeans ------------------------------------------------------------------


def test_single_doc():
    result = run_linked_kmeans(make_corpus(["jaguar car"]))
    assert result.miscellaneous == {0} and result.clusters == []


def test_three_planted_linked_categories():
    corpus = synth_corpus(planted_spec([10, 12, 8], p_intra=0.6, rng_seed=4))
    result = run_linked_kmeans(corpus)
    labels = corpus.labels.labels
    assert result.k_seed == 3
    for group in result.seeds.groups:
        assert len({labels[d] for d in group}) == 1
    for cluster in result.clusters:
        assert len({labels[d] for d in cluster.members}) == 1
    assert result.k_final == 3


def test_clustered_at_least_seeded():
    corpus = synth_corpus(planted_spec([9, 9, 9], p_intra=0.15, rng_seed=2))
    result = run_linked_kmeans(corpus)
    assert result.clustered_count >= len(result.seeded)


def test_unequal_sizes_preserved_through_links():
    corpus = synth_corpus(planted_spec([10, 2], p_intra=1.0, rng_seed=0))
    result = run_linked_kmeans(corpus)
    assert sorted(len(c.members) for c in result.clusters) == [2, 10]


@pytest.mark.parametrize("rng_seed", range(5))
def test_unequal_sizes_preserved_through_text_alone(rng_seed):
    # long documents over a small vocabulary so every pair is well above alpha
    spec = planted_spec([10, 2], vocab_size=15, doc_length=80, p_intra=0.0, rng_seed=rng_seed)
    corpus = synth_corpus(spec)
    result = run_linked_kmeans(corpus)
    assert result.k_seed == 0
    assert sorted(len(c.members) for c in result.clusters) == [2, 10]


def test_rag_bag_orthogonal_doc_stays_out_of_seeds():
    texts = ["jaguar car engine", "jaguar car speed", "jaguar car engine speed", "puma knives blade"]
    corpus = make_corpus(texts, edges=[(0, 1), (1, 2)])
    result = run_linked_kmeans(corpus)
    seed_ids = {c.centroid_id for c in result.clusters if c.origin == "seed"}
    assert result.assignment[3] not in seed_ids
    assert 3 in result.miscellaneous


def test_refinement_passes_keep_partition():
    corpus = synth_corpus(planted_spec([8, 8, 8], vocab_size=40, shared_size=20, mix=0.3, p_intra=0.1, rng_seed=3))
    for passes in (1, 2, 4):
        result = run_linked_kmeans(corpus, ClusterParams(0.5, passes))
        assert result.violations(0.5) == []


def test_deterministic():
    corpus = synth_corpus(planted_spec([6, 7, 5], mix=0.2, shared_size=10, p_intra=0.2, rng_seed=9))
    a, b = run_linked_kmeans(corpus), run_linked_kmeans(corpus)
    assert a.clusters == b.clusters and a.miscellaneous == b.miscellaneous
    assert a.similarities == b.similarities


def test_top_terms():
    vocab, vectors = vectorize_texts(["jaguar jaguar car", "puma shoe", "jaguar engine"])
    v = l2_normalize(vectors[0])
    terms = top_terms(v, vocab, 2)
    assert terms[0] == "car"
    assert Counter(terms) == Counter({"car": 1, "jaguar": 1})
