"""Cluster quality against gold categories: purity, entropy, precision, recall.

Each cluster is matched to its leading category (ties broken by name). Only
labeled documents are counted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .clustering import ClusteringResult
from .corpus import GoldLabels

__all__ = [
    "ConfusionCounts",
    "MetricsRow",
    "MetricsReport",
    "cluster_counts",
    "leading_category",
    "purity",
    "entropy",
    "precision_recall",
    "compare_report",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ["method", "cluster_id", "size", "matched_category", "purity", "entropy", "precision", "recall"]
MISC_ID = "misc"


@dataclass(frozen=True)
class ConfusionCounts:
    """Category counts of one cluster plus the sizes of every category."""

    counts: Mapping[str, int]
    class_sizes: Mapping[str, int]

    @property
    def size(self) -> int:
        return sum(self.counts.values())

    @property
    def matched(self) -> str:
        return leading_category(self.counts)

    @property
    def relevant_retrieved(self) -> int:
        return self.counts[self.matched]

    @property
    def relevant_total(self) -> int:
        return self.class_sizes[self.matched]


def cluster_counts(members: Sequence[int], gold: GoldLabels) -> Counter:
    return Counter(gold.labels[d] for d in members if d in gold.labels)


def leading_category(counts: Mapping[str, int]) -> str:
    if not counts or sum(counts.values()) == 0:
        raise ValueError("empty cluster has no leading category")
    return min(counts, key=lambda h: (-counts[h], h))


def purity(counts: Mapping[str, int]) -> float:
    """Share of the cluster taken by its leading category."""
    n = sum(counts.values())
    if n == 0:
        raise ValueError("purity of an empty cluster")
    return max(counts.values()) / n


def entropy(counts: Mapping[str, int], c: int) -> float:
    """Category entropy of a cluster normalized by ``log c``.

    ``c`` is the number of categories in the whole collection; absent
    categories contribute nothing.
    """
    if c < 2:
        raise ValueError(f"entropy needs at least two categories, got c={c}")
    n = sum(counts.values())
    if n == 0:
        raise ValueError("entropy of an empty cluster")
    h = 0.0
    for cnt in counts.values():
        if cnt > 0:
            p = cnt / n
            h -= p * math.log(p)
    return h / math.log(c)


def precision_recall(counts: Mapping[str, int], class_sizes: Mapping[str, int]) -> tuple[float, float]:
    """Precision and recall of a cluster retrieved as its leading category."""
    n = sum(counts.values())
    if n == 0:
        raise ValueError("precision of an empty cluster")
    matched = leading_category(counts)
    hits = counts[matched]
    total = class_sizes.get(matched, 0)
    if total < hits:
        raise ValueError(f"category {matched!r} has {total} documents but the cluster holds {hits}")
    return hits / n, hits / total


@dataclass
class MetricsRow:
    method: str
    cluster_id: int | str
    size: int
    matched_category: str
    purity: float
    entropy: float
    precision: float
    recall: float
    miscellaneous: bool = False


@dataclass
class MetricsReport:
    rows: list[MetricsRow]
    aggregates: dict[str, dict[str, float]]
    c: int
    unlabeled: dict[str, int] = field(default_factory=dict)
    weighting: str = "size-weighted mean over clusters (miscellaneous excluded)"

    def for_method(self, method: str) -> list[MetricsRow]:
        return [r for r in self.rows if r.method == method]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.method, r.cluster_id, r.size, r.matched_category,
                             f"{r.purity:.6f}", f"{r.entropy:.6f}", f"{r.precision:.6f}", f"{r.recall:.6f}"])
        for method, agg in self.aggregates.items():
            writer.writerow([method, "aggregate", int(agg["size"]), "",
                             f"{agg['purity']:.6f}", f"{agg['entropy']:.6f}",
                             f"{agg['precision']:.6f}", f"{agg['recall']:.6f}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "weighting": self.weighting,
            "rows": [asdict(r) for r in self.rows],
            "aggregates": self.aggregates,
            "unlabeled": self.unlabeled,
        }


def _row(method, cluster_id, counts, gold_sizes, c, misc=False):
    pr, rc = precision_recall(counts, gold_sizes)
    # With a single category every cluster is trivially homogeneous.
    ent = entropy(counts, c) if c >= 2 else 0.0
    return MetricsRow(method, cluster_id, sum(counts.values()), leading_category(counts),
                      purity(counts), ent, pr, rc, misc)


def compare_report(results: Sequence[tuple[str, ClusteringResult]], gold: GoldLabels) -> MetricsReport:
    """Per-cluster metrics for each method and size-weighted aggregates.

    The miscellaneous group gets its own flagged row but does not enter the
    aggregates. Clusters without labeled documents are skipped.
    """
    if not gold.labels:
        raise ValueError("corpus has no gold labels; evaluate on a labeled corpus (see `linkmeans synth`)")
    sizes = gold.category_sizes()
    c = gold.c
    rows, aggregates, unlabeled = [], {}, {}
    for method, result in results:
        method_rows = []
        for cluster in result.clusters:
            counts = cluster_counts(cluster.members, gold)
            if counts:
                method_rows.append(_row(method, cluster.centroid_id, counts, sizes, c))
        total = sum(r.size for r in method_rows)
        if total:
            aggregates[method] = {
                key: sum(getattr(r, key) * r.size for r in method_rows) / total
                for key in ("purity", "entropy", "precision", "recall")
            }
        else:
            aggregates[method] = {key: float("nan") for key in ("purity", "entropy", "precision", "recall")}
        aggregates[method]["size"] = total
        aggregates[method]["clusters"] = len(result.clusters)
        misc_counts = cluster_counts(sorted(result.miscellaneous), gold)
        if misc_counts:
            method_rows.append(_row(method, MISC_ID, misc_counts, sizes, c, misc=True))
        unlabeled[method] = sum(
            1 for cl in result.clusters for d in cl.members if d not in gold.labels
        ) + sum(1 for d in result.miscellaneous if d not in gold.labels)
        rows.extend(method_rows)
    return MetricsReport(rows, aggregates, c, unlabeled)


def report_to_text(report: MetricsReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        return report.to_csv()
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True)
    raise ValueError(f"unknown format {fmt!r}")
