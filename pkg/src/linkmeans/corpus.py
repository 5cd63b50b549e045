"""Loading and link resolution for a single search result set.

A corpus file is UTF-8 JSONL, one result page per line::

    {"url": "...", "title": "...", "text": "...", "outlinks": [...], "label": "..."}

``html`` may replace ``text``; the visible text is then extracted from it.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import NamedTuple
from urllib.parse import urlsplit, urlunsplit

__all__ = [
    "CorpusError",
    "DocumentRecord",
    "LinkAdjacency",
    "GoldLabels",
    "CorpusStats",
    "Corpus",
    "extract_text",
    "normalize_url",
    "load_corpus",
    "parse_corpus_lines",
    "corpus_stats",
]


class CorpusError(ValueError):
    """Raised when a corpus file is malformed."""


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: int
    url: str
    title: str
    text: str
    outlink_urls: tuple[str, ...] = ()
    raw_html: str | None = None
    gold_label: str | None = None


@dataclass(frozen=True)
class LinkAdjacency:
    """Directed in-corpus hyperlinks between documents ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        for src, dst in self.edges:
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise ValueError(f"edge ({src}, {dst}) outside [0, {self.n})")
            if src == dst:
                raise ValueError(f"self-loop on document {src}")

    @classmethod
    def from_pairs(cls, n, pairs):
        """Build an adjacency, silently dropping self-loops and duplicates."""
        return cls(n, frozenset((int(a), int(b)) for a, b in pairs if a != b))

    def neighbors(self) -> list[set[int]]:
        """Undirected neighbourhood of every document."""
        nbrs = [set() for _ in range(self.n)]
        for src, dst in self.edges:
            nbrs[src].add(dst)
            nbrs[dst].add(src)
        return nbrs


@dataclass(frozen=True)
class GoldLabels:
    labels: dict[int, str] = field(default_factory=dict)

    @property
    def c(self) -> int:
        """Number of distinct categories."""
        return len(set(self.labels.values()))

    def category_sizes(self) -> Counter:
        return Counter(self.labels.values())

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class CorpusStats:
    n: int
    edge_count: int
    labeled_count: int
    category_histogram: dict[str, int]


class Corpus(NamedTuple):
    documents: list[DocumentRecord]
    adjacency: LinkAdjacency
    labels: GoldLabels


# --- text extraction -------------------------------------------------------

# Tags whose boundaries do not separate words.
_INLINE_TAGS = frozenset(
    "a abbr b bdi bdo cite code data dfn em font i kbd mark q s samp small span "
    "strong sub sup time u var wbr".split()
)
_SKIP_TAGS = frozenset({"script", "style"})
_WS = re.compile(r"\s+")


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self.meta: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag == "meta":
            self._meta(attrs)
        elif tag not in _INLINE_TAGS:
            self.chunks.append(" ")

    def handle_startendtag(self, tag, attrs):
        if tag == "meta":
            self._meta(attrs)
        elif tag not in _INLINE_TAGS:
            self.chunks.append(" ")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag not in _INLINE_TAGS:
            self.chunks.append(" ")

    def handle_data(self, data):
        if not self._skip_depth:
            self.chunks.append(data)

    def _meta(self, attrs):
        attrs = {k.lower(): v for k, v in attrs if k}
        if (attrs.get("name") or "").strip().lower() == "description" and attrs.get("content"):
            self.meta.append(attrs["content"])


def _collapse(text):
    return _WS.sub(" ", text).strip()


def extract_text(raw_html: str) -> str:
    """Return the visible text of ``raw_html`` followed by any meta description.

    Script and style contents are dropped and whitespace is collapsed to
    single spaces. Plain text passes through unchanged apart from whitespace.
    """
    parser = _TextExtractor()
    try:
        parser.feed(raw_html)
        parser.close()
    except Exception:  # pragma: no cover - HTMLParser is lenient; last resort
        return _collapse(re.sub(r"<[^>]*>", " ", raw_html))
    body = _collapse("".join(parser.chunks))
    meta = _collapse(" ".join(parser.meta))
    return " ".join(part for part in (body, meta) if part)


# --- urls --------------------------------------------------------------------

_DEFAULT_PORTS = {"http": 80, "https": 443}


def normalize_url(url: str) -> str:
    """Canonical form used to match outlinks against result URLs.

    Lowercases scheme and host, drops default ports, fragments and the bare
    trailing slash. Anything that does not parse as ``scheme://host`` is
    returned trimmed and lowercased.
    """
    stripped = url.strip()
    try:
        parts = urlsplit(stripped)
        port = parts.port
    except ValueError:
        return stripped.lower()
    if not parts.scheme or not parts.netloc or parts.hostname is None:
        return stripped.lower()

    scheme = parts.scheme.lower()
    host = parts.hostname.lower()
    if ":" in host:
        host = f"[{host}]"
    netloc = host
    if port is not None and _DEFAULT_PORTS.get(scheme) != port:
        netloc = f"{host}:{port}"
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += ":" + parts.password
        netloc = f"{userinfo}@{netloc}"
    path = "" if parts.path == "/" else parts.path
    return urlunsplit((scheme, netloc, path, parts.query, ""))


# --- loading -----------------------------------------------------------------


def parse_corpus_lines(lines) -> Corpus:
    """Build a corpus from an iterable of JSONL lines (blank lines ignored)."""
    raw = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CorpusError(f"line {lineno}: expected a JSON object")
        raw.append((lineno, obj))

    documents = []
    url_lines: dict[str, list[int]] = {}
    for doc_id, (lineno, obj) in enumerate(raw):
        url = obj.get("url")
        if not isinstance(url, str) or not url.strip():
            raise CorpusError(f"line {lineno}: missing required field 'url'")
        html, text = obj.get("html"), obj.get("text")
        if text is None and html is None:
            raise CorpusError(f"line {lineno}: one of 'text' or 'html' is required")
        if text is None:
            text = extract_text(html)
        outlinks = obj.get("outlinks") or []
        if not isinstance(outlinks, list) or not all(isinstance(u, str) for u in outlinks):
            raise CorpusError(f"line {lineno}: 'outlinks' must be an array of strings")
        label = obj.get("label")
        canonical = normalize_url(url)
        url_lines.setdefault(canonical, []).append(lineno)
        documents.append(
            DocumentRecord(
                doc_id=doc_id,
                url=canonical,
                title=obj.get("title") or "",
                text=text,
                outlink_urls=tuple(outlinks),
                raw_html=html,
                gold_label=None if label is None else str(label),
            )
        )

    dupes = {u: ls for u, ls in url_lines.items() if len(ls) > 1}
    if dupes:
        detail = "; ".join(f"{u!r} on lines {', '.join(map(str, ls))}" for u, ls in dupes.items())
        raise CorpusError(f"duplicate URLs after normalization: {detail}")

    index = {doc.url: doc.doc_id for doc in documents}
    edges = set()
    for doc in documents:
        for link in doc.outlink_urls:
            dst = index.get(normalize_url(link))
            if dst is not None and dst != doc.doc_id:
                edges.add((doc.doc_id, dst))

    labels = {doc.doc_id: doc.gold_label for doc in documents if doc.gold_label is not None}
    return Corpus(documents, LinkAdjacency(len(documents), frozenset(edges)), GoldLabels(labels))


def load_corpus(path) -> Corpus:
    """Read a JSONL corpus file. Document ids follow file order."""
    with Path(path).open(encoding="utf-8") as fh:
        return parse_corpus_lines(fh)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    documents, adjacency, labels = corpus
    return CorpusStats(
        n=len(documents),
        edge_count=len(adjacency.edges),
        labeled_count=len(labels),
        category_histogram=dict(sorted(labels.category_sizes().items())),
    )
