"""Built-in English stopword list (lowercase, 177 words).

Contractions are listed by the fragments the tokenizer leaves behind
("don't" -> "don").
"""

from pathlib import Path

ENGLISH_STOPWORDS = frozenset(
    """
    a about above across after again against all along also am among an and
    any are aren around as at be because been before behind being below
    between beyond both but by can cannot could couldn did didn do does
    doesn doing don down during each else etc ever every few for from
    further had hadn has hasn have haven having he her here hers herself him
    himself his how however i if in into is isn it its itself just ll may me
    might more most must mustn my myself no nor not now of off on once only
    onto or other ought our ours ourselves out over own per re same shall
    shan she should shouldn so some such than that the their theirs them
    themselves then there therefore these they this those through thus to
    too toward towards under until up upon us ve very via was wasn we were
    weren what when where whether which while who whom whose why will with
    within without won would wouldn yet you your yours yourself yourselves
    """.split()
)


def load_stoplist(path) -> frozenset[str]:
    """Read a stoplist file: UTF-8, one word per line; blank lines ignored."""
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())
