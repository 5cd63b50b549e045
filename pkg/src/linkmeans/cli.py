"""Command line entry point: ``linkmeans {cluster,eval,synth,compare}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .baselines import cluster_with_baseline
from .clustering import Cluster, ClusteringResult, ClusterParams, assign_documents, seed_centroid_set, top_terms
from .corpus import CorpusError, load_corpus
from .evaluate import compare_report, report_to_text
from .preprocess import dump_vectors_csv, vectorize_texts
from .seeding import seed_groups
from .stopwords import ENGLISH_STOPWORDS, load_stoplist
from .synth import generate_corpus, load_spec, run_experiment

log = logging.getLogger("linkmeans")


def result_to_json(result: ClusteringResult) -> dict:
    centroids = {c.centroid_id: c for c in result.centroids} if result.centroids is not None else {}
    clusters = []
    for cl in result.clusters:
        terms = []
        if cl.centroid_id in centroids and result.vocabulary is not None:
            terms = top_terms(centroids[cl.centroid_id].vector, result.vocabulary)
        clusters.append({"centroid_id": cl.centroid_id, "origin": cl.origin, "members": list(cl.members), "top_terms": terms})
    return {
        "method": result.method,
        "k_seed": result.k_seed,
        "k_final": result.k_final,
        "clusters": clusters,
        "miscellaneous": sorted(result.miscellaneous),
        "similarities": {str(d): s for d, s in sorted(result.similarities.items())},
    }


def result_from_json(obj: dict, n_docs: int) -> ClusteringResult:
    clusters = [Cluster(int(c["centroid_id"]), tuple(c["members"]), c.get("origin", "seed")) for c in obj["clusters"]]
    return ClusteringResult(
        n_docs=n_docs,
        clusters=clusters,
        miscellaneous=frozenset(obj.get("miscellaneous", [])),
        similarities={int(d): float(s) for d, s in obj.get("similarities", {}).items()},
        k_seed=int(obj.get("k_seed", 0)),
        method=obj.get("method", "linked"),
    )


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_cluster(args) -> int:
    corpus = load_corpus(args.corpus)
    stoplist = load_stoplist(args.stoplist) if args.stoplist else ENGLISH_STOPWORDS
    vocab, vectors = vectorize_texts([d.text for d in corpus.documents], stoplist)
    if args.dump_vectors:
        dump_vectors_csv(args.dump_vectors, vectors, vocab)

    if args.method == "linked":
        seeds, initial = seed_centroid_set(seed_groups(corpus.adjacency), vectors)
        if args.dump_seeds:
            Path(args.dump_seeds).write_text(json.dumps(seeds.to_json()) + "\n", encoding="utf-8")
        _, result = assign_documents(vectors, initial, ClusterParams(args.alpha, args.max_passes))
        log.info("k from links: %d, final clusters: %d", result.k_seed, result.k_final)
    else:
        if args.k is None:
            raise ValueError(f"--k is required for --method {args.method}")
        result = cluster_with_baseline(vectors, args.method, args.k, args.seed, dim=len(vocab))
    result.vocabulary = vocab
    _write(args.out, json.dumps(result_to_json(result), indent=2) + "\n")
    return 0


def cmd_eval(args) -> int:
    corpus = load_corpus(args.corpus)
    obj = json.loads(Path(args.result).read_text(encoding="utf-8"))
    result = result_from_json(obj, len(corpus.documents))
    report = compare_report([(result.method, result)], corpus.labels)
    _write(args.out, report_to_text(report, args.format))
    return 0


def cmd_synth(args) -> int:
    generate_corpus(load_spec(args.spec), args.out)
    return 0


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    exp = run_experiment(load_spec(args.spec), methods, ClusterParams(args.alpha), args.k, args.seed)
    _write(args.out, exp.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkmeans", description="Link-seeded clustering of search results.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--method", choices=["linked", "kmeans", "skmeans"], default="linked")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-passes", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stoplist")
    p.add_argument("--dump-seeds")
    p.add_argument("--dump-vectors")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a clustering against gold labels")
    p.add_argument("--result", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="run methods on a synthetic corpus and compare")
    p.add_argument("--spec", required=True)
    p.add_argument("--methods", default="linked,kmeans,skmeans")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CorpusError, ValueError, FileNotFoundError) as exc:
        print(f"linkmeans: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
