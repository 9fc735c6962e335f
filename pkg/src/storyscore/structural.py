"""Structure-sensitive metrics: prompt cleanliness and title coverage."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import Outline, Story
from .errors import ConfigError, MetricError
from .lexical import MetricValue
from .textkit import split_blocks, split_sentences, string_similarity

PATTERN_CLASSES = (
    "line_markers",
    "sentence_imperatives",
    "json_line",
    "code_fence",
    "instruction_block",
)

# Contamination weights per pattern class, heaviest for near-total collapse
# into instruction-following output.
WEIGHT_LINE = 1.0
WEIGHT_SENT = 0.75
WEIGHT_JSON = 1.25
WEIGHT_FENCE = 0.75
WEIGHT_BLOCK = 2.5

# A paragraph counts as an instruction block at this many imperative hits.
BLOCK_HITS = 3


class PatternSet:
    """Five named lists of regex rules that define contamination matching.

    The set is content-hashed so reports can record exactly which rules
    produced their numbers.
    """

    def __init__(self, rules: dict[str, list[str]]):
        unknown = set(rules) - set(PATTERN_CLASSES)
        if unknown:
            raise ConfigError(f"unknown pattern classes: {sorted(unknown)}")
        self.rules = {cls: tuple(rules.get(cls, ())) for cls in PATTERN_CLASSES}
        self.compiled = {}
        for cls, patterns in self.rules.items():
            try:
                self.compiled[cls] = tuple(re.compile(p) for p in patterns)
            except re.error as e:
                raise ConfigError(f"bad regex in {cls}: {e}") from None
        canon = json.dumps({c: list(self.rules[c]) for c in PATTERN_CLASSES}, sort_keys=True)
        self.sha = hashlib.sha256(canon.encode("utf-8")).hexdigest()

    @classmethod
    def from_file(cls, path: str | Path) -> "PatternSet":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"pattern file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed pattern JSON: {path} ({e})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"pattern file must be a JSON object: {path}")
        return cls(data)

    @classmethod
    def default(cls) -> "PatternSet":
        data = resources.files("storyscore.data").joinpath("patterns.json").read_text("utf-8")
        return cls(json.loads(data))


@dataclass(frozen=True)
class ContaminationCounts:
    n_line: int
    n_sent: int
    n_json: int
    n_fence: int
    n_block: int
    nonempty_lines: int


def _matches_any(patterns, text: str) -> bool:
    return any(p.search(text) for p in patterns)


def count_contamination(story: Story, patterns: PatternSet) -> ContaminationCounts:
    """Count instruction-leakage artifacts line by line and sentence by sentence.

    Block hits are counted per paragraph: three or more imperative-constraint
    matches inside one blank-line-delimited block flag that block once
    (a single dense sentence is covered by its enclosing paragraph).
    """
    text = story.full_text
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MetricError(f"no lines: story {story.id!r} has empty text")

    n_line = sum(1 for ln in lines if _matches_any(patterns.compiled["line_markers"], ln))
    n_json = sum(1 for ln in lines if _matches_any(patterns.compiled["json_line"], ln))
    n_fence = sum(1 for ln in lines if _matches_any(patterns.compiled["code_fence"], ln))
    n_sent = sum(
        1
        for s in split_sentences(text)
        if _matches_any(patterns.compiled["sentence_imperatives"], s.text)
    )
    n_block = 0
    for _, block in split_blocks(text):
        hits = sum(len(p.findall(block)) for p in patterns.compiled["instruction_block"])
        if hits >= BLOCK_HITS:
            n_block += 1

    return ContaminationCounts(
        n_line=n_line,
        n_sent=n_sent,
        n_json=n_json,
        n_fence=n_fence,
        n_block=n_block,
        nonempty_lines=len(lines),
    )


def prompt_cleanliness(story: Story, patterns: PatternSet) -> MetricValue:
    """One minus the clipped, weighted contamination rate per nonempty line."""
    c = count_contamination(story, patterns)
    contamination = (
        WEIGHT_LINE * c.n_line
        + WEIGHT_SENT * c.n_sent
        + WEIGHT_JSON * c.n_json
        + WEIGHT_FENCE * c.n_fence
        + WEIGHT_BLOCK * c.n_block
    ) / c.nonempty_lines
    return MetricValue(
        name="prompt_cleanliness",
        value=1.0 - min(1.0, contamination),
        details={
            "contamination": contamination,
            "n_line": c.n_line,
            "n_sent": c.n_sent,
            "n_json": c.n_json,
            "n_fence": c.n_fence,
            "n_block": c.n_block,
            "nonempty_lines": c.nonempty_lines,
            "pattern_sha": patterns.sha,
        },
    )


_TITLE_JUNK = re.compile(r"[^\w\s]|_")
_WS = re.compile(r"\s+")


def normalize_title(title: str) -> str:
    """Erase case, punctuation, and whitespace differences between titles."""
    cleaned = _TITLE_JUNK.sub("", title.lower())
    return _WS.sub(" ", cleaned).strip()


def title_coverage(story: Story, outline: Outline) -> MetricValue:
    """Mean soft similarity between generated and target titles, paired by position.

    Generated titles beyond the outline length are ignored; missing ones
    contribute zero similarity.
    """
    if not outline.titles:
        raise MetricError("empty outline")
    generated = story.titles
    pairs = []
    total = 0.0
    for i, target in enumerate(outline.titles):
        if i < len(generated):
            sim = string_similarity(normalize_title(generated[i]), normalize_title(target))
            pairs.append({"generated": generated[i], "target": target, "similarity": sim})
        else:
            sim = 0.0
            pairs.append({"generated": None, "target": target, "similarity": 0.0})
        total += sim
    return MetricValue(
        name="title_coverage",
        value=total / len(outline.titles),
        details={"slots": len(outline.titles), "generated_titles": len(generated), "pairs": pairs},
    )
