"""Text to unit-length tf-idf vectors.

Pipeline per document: tokenize -> drop stopwords -> Porter stem -> count.
Weights are ``tf * ln(N / df)``; terms occurring in every document vanish.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from nltk.stem.porter import PorterStemmer

from .stopwords import ENGLISH_STOPWORDS

__all__ = [
    "TokenSequence",
    "Vocabulary",
    "SparseVector",
    "tokenize",
    "remove_stopwords",
    "stem",
    "preprocess_text",
    "build_vocabulary",
    "tfidf_vectorize",
    "l2_normalize",
    "vectorize_texts",
    "sum_vectors",
    "dump_vectors_csv",
]

_NON_ALNUM = re.compile(r"[^0-9a-z]+")
# The 1980 rule set, without later departures.
_STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@dataclass(frozen=True)
class TokenSequence:
    doc_id: int
    tokens: tuple[str, ...]

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


@dataclass
class Vocabulary:
    term_ids: dict[str, int] = field(default_factory=dict)
    df: list[int] = field(default_factory=list)
    n_docs: int = 0

    def __len__(self):
        return len(self.term_ids)

    @property
    def terms(self) -> list[str]:
        """Terms ordered by id."""
        return list(self.term_ids)


class SparseVector:
    """Nonnegative sparse vector with strictly increasing term ids.

    Zero weights are never stored, so a vector with no entries is the zero
    vector; ``is_empty`` flags that degenerate case.
    """

    __slots__ = ("indices", "weights", "norm")

    def __init__(self, indices=(), weights=()):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if idx.shape != w.shape:
            raise ValueError("indices and weights differ in length")
        if idx.size:
            order = np.argsort(idx, kind="stable")
            idx, w = idx[order], w[order]
            if np.any(np.diff(idx) == 0):
                raise ValueError("duplicate term ids")
            if np.any(w < 0):
                raise ValueError("negative weight")
            keep = w > 0
            idx, w = idx[keep], w[keep]
        idx.flags.writeable = False
        w.flags.writeable = False
        self.indices = idx
        self.weights = w
        self.norm = float(np.sqrt(np.dot(w, w)))

    @classmethod
    def from_dict(cls, mapping):
        items = sorted(mapping.items())
        return cls([k for k, _ in items], [v for _, v in items])

    @property
    def is_empty(self) -> bool:
        return self.indices.size == 0

    def __len__(self):
        return int(self.indices.size)

    def items(self):
        return zip(self.indices.tolist(), self.weights.tolist())

    def to_dict(self) -> dict[int, float]:
        return dict(self.items())

    def dot(self, other: SparseVector) -> float:
        _, ia, ib = np.intersect1d(self.indices, other.indices, assume_unique=True, return_indices=True)
        return float(np.dot(self.weights[ia], other.weights[ib]))

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        out[self.indices] = self.weights
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(self.weights, other.weights)

    def __repr__(self):
        body = ", ".join(f"{i}: {w:.4g}" for i, w in self.items())
        return f"SparseVector({{{body}}})"


def tokenize(text: str, doc_id: int = 0) -> TokenSequence:
    """Lowercase and split on non-alphanumeric runs.

    Tokens shorter than two characters and all-digit tokens are dropped.
    """
    tokens = tuple(
        tok for tok in _NON_ALNUM.split(text.lower()) if len(tok) >= 2 and not tok.isdigit()
    )
    return TokenSequence(doc_id, tokens)


def remove_stopwords(seq: TokenSequence, stoplist: Iterable[str] = ENGLISH_STOPWORDS) -> TokenSequence:
    stoplist = stoplist if isinstance(stoplist, (set, frozenset)) else frozenset(stoplist)
    return TokenSequence(seq.doc_id, tuple(t for t in seq.tokens if t not in stoplist))


@lru_cache(maxsize=65536)
def stem(token: str) -> str:
    """Porter stem of a lowercase token."""
    return _STEMMER.stem(token, to_lowercase=False)


def preprocess_text(text: str, doc_id: int = 0, stoplist=ENGLISH_STOPWORDS) -> TokenSequence:
    """Tokenize, remove stopwords, and stem."""
    seq = remove_stopwords(tokenize(text, doc_id), stoplist)
    return TokenSequence(doc_id, tuple(stem(t) for t in seq.tokens))


def build_vocabulary(sequences: Sequence[TokenSequence]) -> Vocabulary:
    """Document frequencies; ids follow first occurrence in doc order."""
    vocab = Vocabulary(n_docs=len(sequences))
    for seq in sorted(sequences, key=lambda s: s.doc_id):
        seen = set()
        for tok in seq.tokens:
            if tok in seen:
                continue
            seen.add(tok)
            tid = vocab.term_ids.get(tok)
            if tid is None:
                vocab.term_ids[tok] = len(vocab.df)
                vocab.df.append(1)
            else:
                vocab.df[tid] += 1
    return vocab


def tfidf_vectorize(seq: TokenSequence, vocab: Vocabulary) -> SparseVector:
    """Unnormalized tf-idf vector of ``seq``; out-of-vocabulary terms are ignored."""
    counts: dict[int, int] = {}
    for tok in seq.tokens:
        tid = vocab.term_ids.get(tok)
        if tid is not None:
            counts[tid] = counts.get(tid, 0) + 1
    weights = {}
    for tid, tf in counts.items():
        df = vocab.df[tid]
        if df < vocab.n_docs:
            weights[tid] = tf * math.log(vocab.n_docs / df)
    return SparseVector.from_dict(weights)


def l2_normalize(v: SparseVector) -> SparseVector:
    """Scale to unit length. The zero vector comes back empty."""
    if v.is_empty or v.norm == 0.0:
        return SparseVector()
    return SparseVector(v.indices, v.weights / v.norm)


def sum_vectors(vectors: Iterable[SparseVector]) -> SparseVector:
    vectors = list(vectors)
    if not vectors:
        return SparseVector()
    idx = np.concatenate([v.indices for v in vectors])
    w = np.concatenate([v.weights for v in vectors])
    uniq, inverse = np.unique(idx, return_inverse=True)
    return SparseVector(uniq, np.bincount(inverse, weights=w, minlength=uniq.size))


def vectorize_texts(texts: Sequence[str], stoplist=ENGLISH_STOPWORDS) -> tuple[Vocabulary, list[SparseVector]]:
    """Run the full pipeline over a collection; returns unit (or empty) vectors."""
    sequences = [preprocess_text(t, i, stoplist) for i, t in enumerate(texts)]
    vocab = build_vocabulary(sequences)
    return vocab, [l2_normalize(tfidf_vectorize(s, vocab)) for s in sequences]


def dump_vectors_csv(path, vectors: Sequence[SparseVector], vocab: Vocabulary) -> None:
    """Write ``doc_id,term,weight`` rows for debugging."""
    terms = vocab.terms
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "term", "weight"])
        for doc_id, vec in enumerate(vectors):
            for tid, w in vec.items():
                writer.writerow([doc_id, terms[tid], repr(w)])
