"""Data model and ingestion for papers, stories, outlines, and evaluation sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    EmptyDocumentError,
    EncodingError,
    LoadError,
    ManifestError,
    MissingFileError,
)
from .textkit import Sentence, split_sentences, token_set

# Title given to text found before the first markdown heading of a story.
PREAMBLE_TITLE = "(preamble)"


@dataclass(frozen=True)
class PaperDoc:
    """A source paper plus the derived views every metric consumes."""

    id: str
    text: str
    token_set: frozenset[str]
    sentences: tuple[Sentence, ...]

    @classmethod
    def from_text(
        cls, doc_id: str, text: str, stopwords: frozenset[str] | None = None
    ) -> "PaperDoc":
        if not text.strip():
            raise EmptyDocumentError(f"empty paper: {doc_id!r}")
        return cls(
            id=doc_id,
            text=text,
            token_set=frozenset(token_set(text, stopwords=stopwords)),
            sentences=tuple(split_sentences(text)),
        )


@dataclass(frozen=True)
class Section:
    title: str
    body: str


@dataclass(frozen=True)
class Story:
    """A generated narrative: ordered titled sections."""

    id: str
    paper_id: str
    sections: tuple[Section, ...]

    def __post_init__(self):
        if not self.sections:
            raise LoadError(f"story {self.id!r} has no sections")
        for sec in self.sections:
            if not sec.title.strip():
                raise LoadError(f"story {self.id!r} has a section with an empty title")

    @property
    def full_text(self) -> str:
        """Concatenation of section bodies (titles excluded)."""
        return "\n\n".join(sec.body for sec in self.sections if sec.body)

    @property
    def titles(self) -> tuple[str, ...]:
        """Generated section titles; the synthetic preamble does not count."""
        return tuple(sec.title for sec in self.sections if sec.title != PREAMBLE_TITLE)


@dataclass(frozen=True)
class Outline:
    """Target section titles the story is expected to realize."""

    titles: tuple[str, ...]

    def __post_init__(self):
        if not self.titles:
            raise LoadError("outline has no titles")
        for t in self.titles:
            if not t.strip():
                raise LoadError("outline contains an empty title")


@dataclass(frozen=True)
class EvalItem:
    paper: PaperDoc
    story: Story
    outline: Outline


@dataclass(frozen=True)
class EvaluationSet:
    """A labeled list of (paper, story, outline) triples."""

    group: str
    items: tuple[EvalItem, ...] = field(default=())

    def __post_init__(self):
        paper_ids = {item.paper.id for item in self.items}
        for item in self.items:
            if item.story.paper_id not in paper_ids:
                raise ManifestError(
                    f"story {item.story.id!r} references unknown paper "
                    f"{item.story.paper_id!r}"
                )


def _read_text(path: str | Path, what: str) -> str:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except FileNotFoundError:
        raise MissingFileError(f"{what} file not found: {p}") from None
    except IsADirectoryError:
        raise MissingFileError(f"{what} path is a directory: {p}") from None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EncodingError(f"{what} file is not valid UTF-8: {p} ({e})") from None


def load_paper(
    path: str | Path,
    paper_id: str | None = None,
    stopwords: frozenset[str] | None = None,
) -> PaperDoc:
    """Load a plain-text or markdown paper; the whole file is the text."""
    text = _read_text(path, "paper")
    if not text.strip():
        raise EmptyDocumentError(f"empty paper: {path}")
    return PaperDoc.from_text(paper_id or Path(path).stem, text, stopwords=stopwords)


def parse_story(text: str, story_id: str, paper_id: str = "") -> Story:
    """Parse markdown into sections; `## ` lines delimit section titles.

    Text before the first heading becomes a section titled ``(preamble)``.
    """
    sections: list[Section] = []
    title: str | None = None
    body: list[str] = []

    def flush():
        if title is None:
            pre = "\n".join(body).strip()
            if pre:
                sections.append(Section(PREAMBLE_TITLE, pre))
        else:
            sections.append(Section(title, "\n".join(body).strip()))

    for line in text.splitlines():
        if line.startswith("## "):
            flush()
            title = line[3:].strip()
            body = []
        else:
            body.append(line)
    flush()

    if not sections:
        raise EmptyDocumentError(f"empty story: {story_id!r} has no headings and no body")
    return Story(id=story_id, paper_id=paper_id, sections=tuple(sections))


def load_story(path: str | Path, story_id: str | None = None, paper_id: str = "") -> Story:
    """Load a markdown story file."""
    text = _read_text(path, "story")
    return parse_story(text, story_id or Path(path).stem, paper_id=paper_id)


def story_to_markdown(story: Story) -> str:
    """Serialize a story back to the markdown convention used by the loader."""
    parts = []
    for sec in story.sections:
        if sec.title == PREAMBLE_TITLE:
            parts.append(sec.body)
        else:
            parts.append(f"## {sec.title}\n\n{sec.body}")
    return "\n\n".join(parts) + "\n"


def load_outline(path: str | Path) -> Outline:
    """Load an outline JSON file: {"sections": [{"title": ...}, ...]}."""
    text = _read_text(path, "outline")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise LoadError(f"malformed outline JSON: {path} ({e})") from None
    sections = data.get("sections") if isinstance(data, dict) else None
    if not isinstance(sections, list) or not sections:
        raise LoadError(f"outline has no sections: {path}")
    titles = []
    for entry in sections:
        if not isinstance(entry, dict) or not isinstance(entry.get("title"), str):
            raise LoadError(f"outline section without a string title: {path}")
        titles.append(entry["title"])
    return Outline(titles=tuple(titles))


def load_evaluation_set(
    manifest_path: str | Path, stopwords: frozenset[str] | None = None
) -> EvaluationSet:
    """Load a manifest of triples; item paths resolve relative to the manifest."""
    p = Path(manifest_path)
    text = _read_text(p, "manifest")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"malformed manifest JSON: {p} ({e})") from None
    if not isinstance(data, dict) or not isinstance(data.get("items"), list):
        raise ManifestError(f"manifest must be an object with an 'items' list: {p}")
    if not data["items"]:
        raise ManifestError(f"manifest has no items: {p}")
    group = data.get("group", "default")
    if not isinstance(group, str) or not group.strip():
        raise ManifestError(f"manifest 'group' must be a nonempty string: {p}")

    base = p.parent
    items = []
    for i, entry in enumerate(data["items"]):
        if not isinstance(entry, dict) or not {"paper", "story", "outline"} <= entry.keys():
            raise ManifestError(f"manifest item {i} must map paper/story/outline paths: {p}")
        paper = load_paper(base / entry["paper"], stopwords=stopwords)
        story = load_story(base / entry["story"], paper_id=paper.id)
        outline = load_outline(base / entry["outline"])
        items.append(EvalItem(paper=paper, story=story, outline=outline))
    return EvaluationSet(group=group, items=tuple(items))
