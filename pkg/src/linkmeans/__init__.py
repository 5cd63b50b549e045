"""Web search result clustering with link-derived k and cosine k-means."""

from .clustering import ClusteringResult, ClusterParams, cosine_similarity, run_linked_kmeans
from .corpus import Corpus, load_corpus
from .evaluate import compare_report, entropy, precision_recall, purity
from .seeding import seed_groups

__version__ = "0.1.0"

__all__ = [
    "ClusterParams",
    "ClusteringResult",
    "Corpus",
    "compare_report",
    "cosine_similarity",
    "entropy",
    "load_corpus",
    "precision_recall",
    "purity",
    "run_linked_kmeans",
    "seed_groups",
]
