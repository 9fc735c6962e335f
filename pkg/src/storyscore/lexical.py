"""Closed-form lexical metrics: context recall and trigram redundancy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .corpus import PaperDoc, Story
from .errors import MetricError
from .textkit import ngrams, token_set, tokenize


@dataclass(frozen=True)
class MetricValue:
    """A named unit-interval score with its intermediate evidence."""

    name: str
    value: float
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        v = self.value
        if not -1e-9 <= v <= 1 + 1e-9:
            raise MetricError(f"metric {self.name!r} out of range: {v}")
        # Tolerate float dust at the boundaries, never beyond.
        object.__setattr__(self, "value", min(1.0, max(0.0, v)))


def context_recall(
    paper: PaperDoc, story: Story, stopwords: frozenset[str] | None = None
) -> MetricValue:
    """Fraction of the paper's token vocabulary that appears in the story.

    The story side is tokenized with the same stopword rule the paper's
    token set was built with; pass the same ``stopwords`` used at load time.
    """
    if not paper.token_set:
        raise MetricError(f"undefined recall: paper {paper.id!r} has an empty token set")
    story_tokens = token_set(story.full_text, stopwords=stopwords)
    overlap = story_tokens & paper.token_set
    return MetricValue(
        name="context_recall",
        value=len(overlap) / len(paper.token_set),
        details={
            "paper_tokens": len(paper.token_set),
            "story_tokens": len(story_tokens),
            "overlap": len(overlap),
        },
    )


def no_redundancy(story: Story, n: int = 3) -> MetricValue:
    """One minus the peak n-gram frequency share; penalizes degenerative loops.

    Conventions: an empty n-gram multiset scores 1.0, and a peak frequency of
    one (nothing repeats) counts as a zero repetition rate, so clean text is
    never penalized for simply being short.
    """
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    tokens = tokenize(story.full_text)
    grams = ngrams(tokens, n)
    if grams.total == 0:
        return MetricValue(
            name="no_redundancy",
            value=1.0,
            details={"n": n, "total": 0, "top_ngram": None, "top_count": 0, "rate": 0.0},
        )
    top_gram, top_count = max(grams.counts.items(), key=lambda kv: kv[1])
    rate = 0.0 if top_count == 1 else top_count / grams.total
    return MetricValue(
        name="no_redundancy",
        value=1.0 - rate,
        details={
            "n": n,
            "total": grams.total,
            "top_ngram": " ".join(top_gram),
            "top_count": top_count,
            "rate": rate,
        },
    )
