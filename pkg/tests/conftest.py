"""Shared fixtures and the acceptance-criteria summary hook."""

from pathlib import Path

import pytest

from storyscore.corpus import Outline, Section, Story
from storyscore.hallucination import GazetteerRecognizer
from storyscore.semantic import HashEmbeddingBackend

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def backend() -> HashEmbeddingBackend:
    return HashEmbeddingBackend(seed=7, dim=64)


@pytest.fixture
def gazetteer() -> GazetteerRecognizer:
    return GazetteerRecognizer.from_file(CORPUS / "gazetteer.json")


@pytest.fixture
def story_factory():
    """Build a Story from (title, body) pairs without touching the filesystem."""

    def make(*sections: tuple[str, str], story_id: str = "s", paper_id: str = "p") -> Story:
        return Story(
            id=story_id,
            paper_id=paper_id,
            sections=tuple(Section(title, body) for title, body in sections),
        )

    return make


@pytest.fixture
def outline_factory():
    def make(*titles: str) -> Outline:
        return Outline(titles=tuple(titles))

    return make


# ---------------------------------------------------------------------------
# Acceptance summary: one pass/fail line per criterion at the end of the run.

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_criterion_" not in name:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE_RESULTS[name.split("[")[0]] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[name]
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}  {name}")
