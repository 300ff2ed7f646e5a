"""Near-duplicate question filtering via stopword-stripped token Jaccard."""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

from .qa_parser import PageQuestionSet, QAPair

# Small fixed English stopword list; similarity should hinge on content words.
STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be
because been before being below between both but by can cannot could
couldn't did didn't do does doesn't doing don't down during each few for
from further had hadn't has hasn't have haven't having he her here hers
herself him himself his how i if in into is isn't it its itself just me
more most mustn't my myself no nor not of off on once only or other ought
our ours ourselves out over own same shan't she should shouldn't so some
such than that the their theirs them themselves then there these they this
those through to too under until up very was wasn't we were weren't what
when where which while who whom why will with won't would wouldn't you
your yours yourself yourselves
""".split())

_TOKEN_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class DedupConfig:
    threshold: float = 0.6
    stopwords: frozenset[str] = STOPWORDS
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class DroppedQuestion:
    """A filtered-out candidate with the accepted pair it duplicated."""

    pair: QAPair
    matched: QAPair
    score: float


def _tokens(text: str, stopwords: frozenset[str]) -> frozenset[str]:
    return frozenset(
        w for w in _TOKEN_RE.findall(text.lower()) if w not in stopwords
    )


def similarity(a: str, b: str, config: DedupConfig | None = None) -> float:
    """Jaccard coefficient of the normalized token sets of ``a`` and ``b``.

    Both sets empty -> 1.0; exactly one empty -> 0.0. Symmetric.
    """
    stopwords = (config or _DEFAULT_CONFIG).stopwords
    ta = _tokens(a, stopwords)
    tb = _tokens(b, stopwords)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def filter_repeats(
    candidates: PageQuestionSet,
    accepted: list[QAPair],
    config: DedupConfig | None = None,
) -> tuple[PageQuestionSet, list[DroppedQuestion]]:
    """Drop candidates whose question text is near-duplicate (similarity >=
    threshold) of any accepted pair or any earlier kept candidate.

    Kept pairs are relabeled to consecutive prefix+1..k; set issues follow
    their pairs (issues of dropped pairs travel with the diagnostics).
    """
    config = config or _DEFAULT_CONFIG
    if not config.enabled:
        return candidates, []
    kept_pairs: list[QAPair] = []
    dropped: list[DroppedQuestion] = []
    pool: list[QAPair] = list(accepted)
    for pair in candidates.pairs:
        match = None
        best = 0.0
        for existing in pool:
            score = similarity(pair.question_text, existing.question_text, config)
            if score >= config.threshold and score >= best:
                match, best = existing, score
        if match is not None:
            dropped.append(DroppedQuestion(pair=pair, matched=match, score=best))
        else:
            kept_pairs.append(pair)
            pool.append(pair)
    if not dropped:
        return candidates, []
    prefix = candidates.kind.label_prefix or "C"
    relabeled: list[QAPair] = []
    label_map: dict[str, str] = {}
    for i, pair in enumerate(kept_pairs, start=1):
        new_label = f"{prefix}{i}"
        label_map[pair.label] = new_label
        relabeled.append(dataclasses.replace(pair, label=new_label))
    issues = []
    for issue in candidates.issues:
        if issue.label is None:
            issues.append(issue)
        elif issue.label in label_map:
            issues.append(dataclasses.replace(issue, label=label_map[issue.label]))
    kept = PageQuestionSet(
        page_index=candidates.page_index,
        kind=candidates.kind,
        pairs=relabeled,
        issues=issues,
    )
    return kept, dropped


_DEFAULT_CONFIG = DedupConfig()
