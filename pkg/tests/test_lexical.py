"""Lexical metric tests with brute-force oracles."""

import random

import pytest
from hypothesis import given, strategies as st

from storyscore.corpus import PaperDoc, Section, Story
from storyscore.errors import MetricError
from storyscore.lexical import MetricValue, context_recall, no_redundancy
from storyscore.textkit import tokenize


def one_section_story(body: str) -> Story:
    return Story(id="s", paper_id="p", sections=(Section("Body", body),))


class TestMetricValue:
    def test_range_enforced(self):
        with pytest.raises(MetricError):
            MetricValue("x", 1.5)
        with pytest.raises(MetricError):
            MetricValue("x", -0.2)

    def test_float_dust_clamped(self):
        assert MetricValue("x", 1.0 + 1e-12).value == 1.0
        assert MetricValue("x", -1e-12).value == 0.0


class TestContextRecall:
    def test_identity(self):
        text = "Quantum error correction codes need careful syndrome measurement."
        paper = PaperDoc.from_text("p", text)
        assert context_recall(paper, one_section_story(text)).value == 1.0

    def test_disjoint(self):
        paper = PaperDoc.from_text("p", "alpha beta gamma delta.")
        assert context_recall(paper, one_section_story("epsilon zeta eta.")).value == 0.0

    def test_hand_counted_overlap(self):
        paper = PaperDoc.from_text("p", "Quantum error correction code.")
        story = one_section_story("Quantum codes help fix error.")
        mv = context_recall(paper, story)
        assert mv.value == 0.5
        assert mv.details == {"paper_tokens": 4, "story_tokens": 5, "overlap": 2}

    def test_empty_paper_token_set(self):
        paper = PaperDoc.from_text("p", "the of and to.")
        with pytest.raises(MetricError, match="undefined recall"):
            context_recall(paper, one_section_story("anything at all"))

    def test_invariant_under_reordering_and_duplication(self):
        paper = PaperDoc.from_text("p", "coral reefs bleach under warm water.")
        a = context_recall(paper, one_section_story("warm water bleaches coral reefs"))
        b = context_recall(paper, one_section_story("reefs coral water warm warm water coral"))
        # Same vocabulary overlap either way ("bleaches" is not "bleach").
        assert a.details["overlap"] >= b.details["overlap"]
        c = context_recall(paper, one_section_story("coral reefs warm water"))
        d = context_recall(paper, one_section_story("water warm reefs coral coral coral"))
        assert c.value == d.value

    def test_brute_force_oracle_random_pairs(self):
        rng = random.Random(42)
        vocab = [f"w{i}" for i in range(120)] + ["the", "of", "and"]
        for _ in range(25):
            paper_text = " ".join(rng.choices(vocab, k=rng.randint(5, 300))) + "."
            story_text = " ".join(rng.choices(vocab, k=rng.randint(5, 300))) + "."
            paper = PaperDoc.from_text("p", paper_text)
            story = one_section_story(story_text)

            paper_tokens = tokenize(paper_text, drop_stopwords=True)
            story_tokens = tokenize(story_text, drop_stopwords=True)
            distinct = []
            for t in paper_tokens:
                if t not in distinct:
                    distinct.append(t)
            hits = sum(1 for t in distinct if t in story_tokens)
            if not distinct:
                continue
            assert context_recall(paper, story).value == hits / len(distinct)


class TestNoRedundancy:
    def test_all_unique_trigrams(self):
        body = " ".join(f"tok{i}" for i in range(100))
        mv = no_redundancy(one_section_story(body))
        assert mv.value == 1.0
        assert mv.details["top_count"] == 1

    def test_fifty_times_loop(self):
        mv = no_redundancy(one_section_story("a b c " * 50))
        assert mv.value == pytest.approx(1 - 50 / 148, abs=1e-12)
        assert mv.value == pytest.approx(0.662, abs=1e-3)
        assert mv.details["top_ngram"] == "a b c"
        assert mv.details["top_count"] == 50
        assert mv.details["total"] == 148

    def test_two_token_story(self):
        mv = no_redundancy(one_section_story("hello world"))
        assert mv.value == 1.0
        assert mv.details["total"] == 0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            no_redundancy(one_section_story("a b c"), n=0)

    def test_monotone_under_injected_loops(self):
        filler = " ".join(f"base{i}" for i in range(30))
        previous = None
        for k in range(2, 7):
            mv = no_redundancy(one_section_story(filler + " " + "x y z " * k))
            assert mv.details["top_ngram"] == "x y z"
            if previous is not None:
                assert mv.value < previous
            previous = mv.value

    @given(st.lists(st.sampled_from("abcde"), max_size=60))
    def test_bounded(self, letters):
        story = one_section_story(" ".join(letters) if letters else "x")
        assert 0.0 <= no_redundancy(story).value <= 1.0
