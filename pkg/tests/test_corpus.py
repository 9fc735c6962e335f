"""Loader and data-model tests."""

import pytest

from storyscore.corpus import (
    Outline,
    PaperDoc,
    Section,
    Story,
    load_evaluation_set,
    load_outline,
    load_paper,
    load_story,
    parse_story,
    story_to_markdown,
)
from storyscore.errors import (
    EmptyDocumentError,
    EncodingError,
    LoadError,
    ManifestError,
    MissingFileError,
)
from storyscore.textkit import token_set


class TestLoadPaper:
    def test_valid_file(self, tmp_path):
        p = tmp_path / "paper.txt"
        p.write_text("Quantum error correction works. Codes help fix it.", encoding="utf-8")
        doc = load_paper(p)
        assert doc.id == "paper"
        assert doc.token_set == frozenset(token_set(doc.text))
        assert len(doc.sentences) == 2

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("  \n ", encoding="utf-8")
        with pytest.raises(EmptyDocumentError, match="empty paper"):
            load_paper(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_paper(tmp_path / "nope.txt")

    def test_non_utf8(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_bytes(b"\xff\xfe garbage \x80")
        with pytest.raises(EncodingError):
            load_paper(p)

    def test_custom_stopwords(self, tmp_path):
        p = tmp_path / "paper.txt"
        p.write_text("alpha beta gamma", encoding="utf-8")
        doc = load_paper(p, stopwords=frozenset({"beta"}))
        assert doc.token_set == {"alpha", "gamma"}


class TestStoryParsing:
    def test_heading_count(self, tmp_path):
        text = "\n".join(f"## Part {i}\n\nbody {i}" for i in range(5))
        p = tmp_path / "s.md"
        p.write_text(text, encoding="utf-8")
        story = load_story(p)
        assert len(story.sections) == 5
        assert story.sections[0].title == "Part 0"

    def test_preamble_fallback(self):
        story = parse_story("just body text, no headings", "s1")
        assert [s.title for s in story.sections] == ["(preamble)"]
        assert story.sections[0].body == "just body text, no headings"

    def test_empty_story(self, tmp_path):
        p = tmp_path / "s.md"
        p.write_text("   \n\n  ", encoding="utf-8")
        with pytest.raises(EmptyDocumentError, match="empty story"):
            load_story(p)

    def test_empty_section_title(self):
        with pytest.raises(LoadError, match="empty title"):
            parse_story("##   \n\nbody", "s1")

    def test_deeper_headings_are_body(self):
        story = parse_story("## Top\n\n### nested stays in body", "s1")
        assert len(story.sections) == 1
        assert "### nested" in story.sections[0].body

    def test_round_trip(self):
        text = "lead-in text\n\n## One\n\nfirst body\n\n## Two\n\nsecond body"
        story = parse_story(text, "s1")
        again = parse_story(story_to_markdown(story), "s1")
        assert again.sections == story.sections

    def test_full_text_concatenates_bodies(self, story_factory):
        story = story_factory(("A", "one"), ("B", "two"))
        assert story.full_text == "one\n\ntwo"

    def test_titles_exclude_preamble(self):
        story = parse_story("intro text\n\n## Real Title\n\nbody", "s1")
        assert story.titles == ("Real Title",)

    def test_story_requires_sections(self):
        with pytest.raises(LoadError):
            Story(id="s", paper_id="p", sections=())


class TestLoadOutline:
    def test_minimal_schema(self, tmp_path):
        p = tmp_path / "o.json"
        p.write_text('{"sections": [{"title": "Intro"}]}', encoding="utf-8")
        assert load_outline(p).titles == ("Intro",)

    def test_empty_sections(self, tmp_path):
        p = tmp_path / "o.json"
        p.write_text('{"sections": []}', encoding="utf-8")
        with pytest.raises(LoadError):
            load_outline(p)

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "o.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(LoadError, match="malformed"):
            load_outline(p)

    def test_order_preserved(self, tmp_path):
        titles = ["One", "Two", "Three", "Four", "Five"]
        p = tmp_path / "o.json"
        p.write_text(
            '{"sections": [' + ", ".join(f'{{"title": "{t}"}}' for t in titles) + "]}",
            encoding="utf-8",
        )
        assert load_outline(p).titles == tuple(titles)

    def test_empty_title_rejected(self, tmp_path):
        p = tmp_path / "o.json"
        p.write_text('{"sections": [{"title": "  "}]}', encoding="utf-8")
        with pytest.raises(LoadError):
            load_outline(p)

    def test_outline_type_rejects_empty(self):
        with pytest.raises(LoadError):
            Outline(titles=())


class TestEvaluationSet:
    def test_fixture_manifest(self, corpus_dir):
        eval_set = load_evaluation_set(corpus_dir / "manifest_a.json")
        assert eval_set.group == "model-a"
        assert len(eval_set.items) == 3
        for item in eval_set.items:
            assert item.story.paper_id == item.paper.id

    def test_missing_item_keys(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"group": "g", "items": [{"paper": "x"}]}', encoding="utf-8")
        with pytest.raises(ManifestError):
            load_evaluation_set(p)

    def test_empty_items(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"group": "g", "items": []}', encoding="utf-8")
        with pytest.raises(ManifestError, match="no items"):
            load_evaluation_set(p)

    def test_referential_integrity_enforced(self):
        paper = PaperDoc.from_text("p1", "some paper text here.")
        story = Story(id="s", paper_id="other", sections=(Section("T", "b"),))
        outline = Outline(titles=("T",))
        from storyscore.corpus import EvalItem, EvaluationSet

        with pytest.raises(ManifestError, match="unknown paper"):
            EvaluationSet(group="g", items=(EvalItem(paper, story, outline),))
