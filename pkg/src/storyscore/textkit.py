"""Deterministic text primitives shared by every metric.

All functions here are pure: same input, same output, no hidden state.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

# A word is a maximal run of Unicode letters/digits; hyphens and apostrophes
# are allowed only between alphanumeric runs, never leading or trailing.
_WORD = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*")

# Sentence terminators: runs of . ! ? followed by whitespace or end of block.
_SENT_END = re.compile(r"[.!?]+(?=\s|$)")

# Blank line (possibly containing spaces/tabs) separating paragraphs.
_BLANK_LINE = re.compile(r"\n[ \t]*\n")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword list: one lowercase token per line, UTF-8."""
    if path is None:
        data = resources.files("storyscore.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        data = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in data.splitlines() if line.strip())


DEFAULT_STOPWORDS = load_stopwords()


def tokenize(
    text: str,
    drop_stopwords: bool = False,
    stopwords: frozenset[str] | None = None,
) -> list[str]:
    """Lowercased word tokens; punctuation-only fragments never appear.

    When ``drop_stopwords`` is set, tokens in ``stopwords`` (default: the
    bundled English list) are removed.
    """
    tokens = _WORD.findall(text.lower())
    if drop_stopwords:
        active = DEFAULT_STOPWORDS if stopwords is None else stopwords
        tokens = [t for t in tokens if t not in active]
    return tokens


def token_set(text: str, stopwords: frozenset[str] | None = None) -> set[str]:
    """Deduplicated, stopword-filtered token vocabulary of a text."""
    return set(tokenize(text, drop_stopwords=True, stopwords=stopwords))


@dataclass(frozen=True)
class NgramMultiset:
    """Multiset of contiguous n-grams drawn from one token sequence."""

    counts: dict[tuple[str, ...], int]
    n: int
    total: int


def ngrams(tokens: list[str], n: int) -> NgramMultiset:
    """Multiset of all contiguous n-grams; empty when the list is shorter than n."""
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    counts = Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return NgramMultiset(counts=dict(counts), n=n, total=max(0, len(tokens) - n + 1))


def _levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def string_similarity(a: str, b: str) -> float:
    """Normalized edit-distance similarity in [0, 1].

    1.0 for identical strings (including two empty ones), 0.0 for a total
    rewrite. Symmetric by construction.
    """
    if not a and not b:
        return 1.0
    return 1.0 - _levenshtein(a, b) / max(len(a), len(b))


@dataclass(frozen=True)
class Sentence:
    """A sentence and its [start, end) character span within the source."""

    text: str
    start: int
    end: int


def split_blocks(text: str) -> list[tuple[int, str]]:
    """Paragraph blocks separated by blank lines, with their start offsets."""
    blocks = []
    start = 0
    for m in _BLANK_LINE.finditer(text):
        blocks.append((start, text[start : m.start()]))
        start = m.end()
    blocks.append((start, text[start:]))
    return blocks


def split_sentences(text: str) -> list[Sentence]:
    """Segment text on terminal punctuation and blank lines, keeping spans.

    A trailing fragment without a terminator is kept as a sentence. Each
    returned span satisfies ``text[s.start:s.end] == s.text``.
    """
    out: list[Sentence] = []
    for offset, block in split_blocks(text):
        cursor = 0
        for m in _SENT_END.finditer(block):
            _push(out, block, cursor, m.end(), offset)
            cursor = m.end()
        _push(out, block, cursor, len(block), offset)
    return out


def _push(out: list[Sentence], block: str, lo: int, hi: int, offset: int) -> None:
    seg = block[lo:hi]
    stripped = seg.strip()
    if not stripped:
        return
    left = lo + (len(seg) - len(seg.lstrip()))
    out.append(Sentence(stripped, offset + left, offset + left + len(stripped)))
