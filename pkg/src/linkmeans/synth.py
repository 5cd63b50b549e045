"""Synthetic labeled result sets and the method comparison driver.

Each category owns a private vocabulary; documents draw tokens from it, or
with probability ``mix`` from a shared vocabulary. Links are sampled over
unordered pairs (``p_intra`` within a category, ``p_inter`` across) and
emitted in one random direction.
"""

from __future__ import annotations

import csv
import io
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import cluster_with_baseline
from .clustering import ClusteringResult, ClusterParams, assign_documents, seed_centroid_set
from .corpus import Corpus, parse_corpus_lines
from .evaluate import CSV_COLUMNS, MetricsReport, compare_report
from .preprocess import stem, vectorize_texts
from .seeding import seed_groups
from .stopwords import ENGLISH_STOPWORDS

__all__ = [
    "CategorySpec",
    "SynthSpec",
    "synthetic_terms",
    "planted_spec",
    "generate_lines",
    "generate_corpus",
    "synth_corpus",
    "ExperimentResult",
    "run_methods",
    "run_experiment",
]

_CONSONANTS = "bdfgklmnprtvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]


def synthetic_terms(count: int, offset: int = 0) -> list[str]:
    """``count`` distinct pseudo-words that survive tokenizing and stemming unchanged.

    Words are numbered; ``offset`` skips the first words so that separate
    calls can hand out disjoint vocabularies.
    """
    out, i, skipped = [], 0, 0
    while len(out) < count:
        n, sylls = i, []
        while True:
            n, r = divmod(n, len(_SYLLABLES))
            sylls.append(_SYLLABLES[r])
            if n == 0:
                break
        while len(sylls) < 2:
            sylls.append(_SYLLABLES[0])
        word = "".join(reversed(sylls)) + "k"
        i += 1
        if stem(word) != word or word in ENGLISH_STOPWORDS:
            continue
        if skipped < offset:
            skipped += 1
            continue
        out.append(word)
    return out


@dataclass(frozen=True)
class CategorySpec:
    name: str
    size: int
    vocabulary: tuple[str, ...]


@dataclass(frozen=True)
class SynthSpec:
    categories: tuple[CategorySpec, ...]
    shared_vocab: tuple[str, ...] = ()
    mix: float = 0.0
    p_intra: float = 0.3
    p_inter: float = 0.0
    doc_length: int = 40
    rng_seed: int = 0
    html: bool = False

    def __post_init__(self):
        for cat in self.categories:
            if cat.size < 1:
                raise ValueError(f"category {cat.name!r} must have size >= 1")
        for name, p in (("mix", self.mix), ("p_intra", self.p_intra), ("p_inter", self.p_inter)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.doc_length < 1:
            raise ValueError("doc_length must be positive")
        seen: dict[str, str] = {}
        for cat in self.categories:
            for term in cat.vocabulary:
                if seen.setdefault(term, cat.name) != cat.name:
                    raise ValueError(f"term {term!r} shared by {seen[term]!r} and {cat.name!r}")

    @property
    def n_docs(self) -> int:
        return sum(c.size for c in self.categories)

    @classmethod
    def from_json(cls, obj: dict) -> SynthSpec:
        """Build from the JSON spec layout.

        A category may give ``vocab_size`` instead of an explicit
        ``vocabulary``; generated vocabularies never overlap. ``shared_vocab``
        may likewise be an integer size.
        """
        offset = 0
        cats = []
        for entry in obj["categories"]:
            vocab = entry.get("vocabulary")
            if vocab is None:
                size = int(entry.get("vocab_size", 30))
                vocab = synthetic_terms(size, offset)
                offset += size
            cats.append(CategorySpec(str(entry["name"]), int(entry["size"]), tuple(vocab)))
        shared = obj.get("shared_vocab", ())
        if isinstance(shared, int):
            shared = synthetic_terms(shared, offset)
        kwargs = {k: obj[k] for k in ("mix", "p_intra", "p_inter", "doc_length", "rng_seed", "html") if k in obj}
        return cls(tuple(cats), tuple(shared), **kwargs)

    def to_json(self) -> dict:
        return {
            "categories": [{"name": c.name, "size": c.size, "vocabulary": list(c.vocabulary)} for c in self.categories],
            "shared_vocab": list(self.shared_vocab),
            "mix": self.mix,
            "p_intra": self.p_intra,
            "p_inter": self.p_inter,
            "doc_length": self.doc_length,
            "rng_seed": self.rng_seed,
            "html": self.html,
        }


def planted_spec(
    sizes: Sequence[int],
    vocab_size: int = 30,
    shared_size: int = 0,
    names: Sequence[str] | None = None,
    **kwargs,
) -> SynthSpec:
    """Spec with one generated vocabulary per category size in ``sizes``."""
    names = list(names) if names is not None else [f"cat{i:02d}" for i in range(len(sizes))]
    cats = tuple(
        CategorySpec(name, int(size), tuple(synthetic_terms(vocab_size, i * vocab_size)))
        for i, (name, size) in enumerate(zip(names, sizes))
    )
    shared = tuple(synthetic_terms(shared_size, len(sizes) * vocab_size))
    return SynthSpec(cats, shared, **kwargs)


def _slug(name):
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-") or "category"


def _html_page(tokens):
    head, body = tokens[:5], tokens[5:]
    return (
        f'<html><head><meta name="description" content="{" ".join(head)}"></head>'
        f'<body><p>{" ".join(body)}</p></body></html>'
    )


def generate_lines(spec: SynthSpec) -> list[str]:
    """JSONL lines of the corpus described by ``spec``; deterministic."""
    rng = np.random.default_rng(spec.rng_seed)
    labels, urls = [], []
    for cat in spec.categories:
        for k in range(cat.size):
            labels.append(cat.name)
            urls.append(f"http://{_slug(cat.name)}.synth.example/page/{k}")
    n = len(labels)

    texts = []
    for label in labels:
        cat_vocab = next(c.vocabulary for c in spec.categories if c.name == label)
        length = max(1, int(rng.poisson(spec.doc_length)))
        shared = rng.random(length) < spec.mix
        if (~shared).any() and not cat_vocab:
            raise ValueError(f"category {label!r} has an empty vocabulary")
        if shared.any() and not spec.shared_vocab:
            raise ValueError("mix > 0 needs a non-empty shared vocabulary")
        tokens = [
            spec.shared_vocab[rng.integers(len(spec.shared_vocab))] if s else cat_vocab[rng.integers(len(cat_vocab))]
            for s in shared
        ]
        texts.append(tokens)

    lab = np.array(labels, dtype=object)
    same = lab[:, None] == lab[None, :]
    prob = np.where(same, spec.p_intra, spec.p_inter)
    draws = rng.random((n, n))
    flips = rng.random((n, n)) < 0.5
    outlinks = [[] for _ in range(n)]
    for i, j in zip(*np.nonzero(np.triu(draws < prob, k=1))):
        src, dst = (j, i) if flips[i, j] else (i, j)
        outlinks[src].append(urls[dst])

    # Result pages arrive interleaved, not grouped by category.
    order = rng.permutation(n)
    lines = []
    for rank, i in enumerate(order.tolist()):
        rec = {"url": urls[i], "title": f"Result {rank + 1}"}
        if spec.html:
            rec["html"] = _html_page(texts[i])
        else:
            rec["text"] = " ".join(texts[i])
        rec["outlinks"] = outlinks[i]
        rec["label"] = labels[i]
        lines.append(json.dumps(rec))
    return lines


def generate_corpus(spec: SynthSpec, out_path) -> Path:
    """Write the corpus to ``out_path`` as JSONL and return the path."""
    out_path = Path(out_path)
    out_path.write_text("".join(line + "\n" for line in generate_lines(spec)), encoding="utf-8")
    return out_path


def synth_corpus(spec: SynthSpec) -> Corpus:
    """Generate and load in memory."""
    return parse_corpus_lines(generate_lines(spec))


@dataclass
class ExperimentResult:
    report: MetricsReport
    results: dict[str, ClusteringResult]
    runtime_s: dict[str, float] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS + ["k_seed", "k_final", "runtime_s"])
        body = csv.reader(io.StringIO(self.report.to_csv()))
        next(body)
        for row in body:
            res = self.results[row[0]]
            writer.writerow(row + [res.k_seed, res.k_final, f"{self.runtime_s[row[0]]:.4f}"])
        return buf.getvalue()


def run_methods(
    corpus: Corpus,
    methods: Sequence[str] = ("linked", "kmeans", "skmeans"),
    params: ClusterParams = ClusterParams(),
    k: int | None = None,
    rng_seed: int = 0,
    stoplist=ENGLISH_STOPWORDS,
) -> tuple[dict[str, ClusteringResult], dict[str, float]]:
    """Cluster one corpus with each method. Baselines default to ``k = c``."""
    documents, adjacency, labels = corpus
    vocab, vectors = vectorize_texts([d.text for d in documents], stoplist)
    if k is None:
        k = max(1, labels.c)
    results, runtimes = {}, {}
    for method in methods:
        start = time.perf_counter()
        if method == "linked":
            seeds, initial = seed_centroid_set(seed_groups(adjacency), vectors)
            _, result = assign_documents(vectors, initial, params)
            result.vocabulary, result.seeds = vocab, seeds
        else:
            result = cluster_with_baseline(vectors, method, k, rng_seed, dim=len(vocab))
            result.vocabulary = vocab
        runtimes[method] = time.perf_counter() - start
        results[method] = result
    return results, runtimes


def run_experiment(
    spec: SynthSpec,
    methods: Sequence[str] = ("linked", "kmeans", "skmeans"),
    params: ClusterParams = ClusterParams(),
    k: int | None = None,
    rng_seed: int = 0,
) -> ExperimentResult:
    """Generate the corpus, run each method, and evaluate against the labels."""
    corpus = synth_corpus(spec)
    results, runtimes = run_methods(corpus, methods, params, k, rng_seed)
    report = compare_report(list(results.items()), corpus.labels)
    return ExperimentResult(report, results, runtimes)


def load_spec(path) -> SynthSpec:
    return SynthSpec.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
