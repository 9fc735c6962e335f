"""Composite aggregation of the six components and full-story evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .corpus import Outline, PaperDoc, Story
from .errors import ComponentError, ConfigError, StoryScoreError
from .hallucination import EntityRecognizer, no_hallucination
from .lexical import MetricValue, context_recall, no_redundancy
from .semantic import EmbeddingBackend, bertscore
from .structural import PatternSet, prompt_cleanliness, title_coverage

# Component names in aggregation order; weights below follow the same order.
COMPONENTS = (
    "context_recall",
    "bertscore",
    "prompt_cleanliness",
    "title_coverage",
    "no_redundancy",
    "no_hallucination",
)


@dataclass(frozen=True)
class WeightConfig:
    """The six aggregation weights; must be non-negative and sum to one."""

    context_recall: float = 0.3
    bertscore: float = 0.2
    prompt_cleanliness: float = 0.2
    title_coverage: float = 0.1
    no_redundancy: float = 0.1
    no_hallucination: float = 0.1

    def __post_init__(self):
        values = self.as_dict()
        for name, w in values.items():
            if w < 0:
                raise ConfigError(f"weight {name} must be non-negative, got {w}")
        total = sum(values.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"weights must sum to 1.0, got {total}")

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in COMPONENTS}

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "WeightConfig":
        unknown = set(data) - set(COMPONENTS)
        if unknown:
            raise ConfigError(f"unknown weight names: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


def story_score(
    components: Mapping[str, float], weights: WeightConfig | None = None
) -> float:
    """Weighted sum of the six unit-interval component values."""
    weights = weights if weights is not None else WeightConfig()
    missing = set(COMPONENTS) - set(components)
    if missing:
        raise ValueError(f"missing component values: {sorted(missing)}")
    w = weights.as_dict()
    total = 0.0
    for name in COMPONENTS:
        v = float(components[name])
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"component {name} out of [0, 1]: {v}")
        total += w[name] * v
    return total


@dataclass(frozen=True)
class MetricBreakdown:
    """The six component results plus the composite score."""

    context_recall: MetricValue
    bertscore: MetricValue
    prompt_cleanliness: MetricValue
    title_coverage: MetricValue
    no_redundancy: MetricValue
    no_hallucination: MetricValue
    story_score: float

    def component_values(self) -> dict[str, float]:
        return {name: getattr(self, name).value for name in COMPONENTS}

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"story_score": self.story_score, "components": {}}
        for name in COMPONENTS:
            mv: MetricValue = getattr(self, name)
            out["components"][name] = {"value": mv.value, "details": mv.details}
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MetricBreakdown":
        kwargs: dict[str, Any] = {}
        for name in COMPONENTS:
            entry = data["components"][name]
            kwargs[name] = MetricValue(name, entry["value"], dict(entry.get("details", {})))
        return cls(story_score=float(data["story_score"]), **kwargs)


def evaluate_story(
    paper: PaperDoc,
    story: Story,
    outline: Outline,
    backend: EmbeddingBackend,
    recognizer: EntityRecognizer,
    weights: WeightConfig | None = None,
    patterns: PatternSet | None = None,
    ngram_n: int = 3,
    stopwords: frozenset[str] | None = None,
) -> MetricBreakdown:
    """Compute all six components and their composite for one triple.

    Fails fast: any component error aborts the evaluation with the component
    named, rather than reporting a partial composite.
    """
    patterns = patterns if patterns is not None else PatternSet.default()

    def run(name: str, fn):
        try:
            return fn()
        except StoryScoreError as e:
            raise ComponentError(name, e) from e

    cr = run("context_recall", lambda: context_recall(paper, story, stopwords=stopwords))
    bs = run("bertscore", lambda: bertscore(backend, story, paper))
    pc = run("prompt_cleanliness", lambda: prompt_cleanliness(story, patterns))
    tc = run("title_coverage", lambda: title_coverage(story, outline))
    nr = run("no_redundancy", lambda: no_redundancy(story, n=ngram_n))
    entity_report = run("no_hallucination", lambda: no_hallucination(recognizer, paper, story))
    nh = MetricValue(
        name="no_hallucination",
        value=entity_report.score,
        details={**entity_report.to_dict(), "recognizer": recognizer.identifier},
    )

    values = {mv.name: mv.value for mv in (cr, bs, pc, tc, nr, nh)}
    composite = story_score(values, weights)
    return MetricBreakdown(
        context_recall=cr,
        bertscore=bs,
        prompt_cleanliness=pc,
        title_coverage=tc,
        no_redundancy=nr,
        no_hallucination=nh,
        story_score=composite,
    )
