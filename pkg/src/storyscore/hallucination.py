"""Entity-level hallucination scoring plus the detector suite.

Detectors are evidence emitters: every decision carries the data that
produced it (matched entities, retrieved contexts, raw judge output), because
none of them is reliable enough to trust as a bare number.
"""

from __future__ import annotations

import json
import re
import socket
import urllib.error
import urllib.request
from abc import ABC, abstractmethod
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any
from urllib.parse import urlsplit

from .corpus import PaperDoc, Story
from .errors import (
    ClientError,
    ClientTimeoutError,
    ConfigError,
    RecognizerError,
    TransportError,
    VerdictParseError,
    VerdictSchemaError,
)
from .semantic import EmbeddingBackend, SentenceIndex, top_k_sentences
from .textkit import split_sentences, tokenize

PERSON = "PERSON"
ORG = "ORG"
OTHER = "OTHER"

_POSSESSIVE = re.compile(r"['’]s\b|['’](?=\s|$)")
_NON_ALNUM = re.compile(r"[^\w\s]|_")
_WS = re.compile(r"\s+")

# Case-preserving word scan; hyphens/apostrophes interior-only, as in textkit.
_CASED_WORD = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*")

# Technical-token scan treats hyphens as separators so acronyms in compounds
# ("FM-based") surface on their own; numbers keep one decimal point.
_TECH = re.compile(r"\d+(?:\.\d+)?|[^\W\d_]+")


def normalize_entity(surface: str) -> str:
    """Lowercase, strip possessive suffixes and punctuation, collapse spaces."""
    s = _POSSESSIVE.sub("", surface.lower())
    s = _NON_ALNUM.sub("", s)
    return _WS.sub(" ", s).strip()


@dataclass(frozen=True)
class EntitySpan:
    surface: str
    label: str  # PERSON | ORG | OTHER
    start: int
    end: int


class EntityRecognizer(ABC):
    """Named-entity recognizer with a stable identifier for reports."""

    @property
    @abstractmethod
    def identifier(self) -> str: ...

    @abstractmethod
    def recognize(self, text: str) -> list[EntitySpan]: ...


class GazetteerRecognizer(EntityRecognizer):
    """Dictionary recognizer: exact surface lookup, case-insensitive, word-bounded.

    Deterministic and model-free; the workhorse for tests and reproducible
    pipelines. Entries map surface strings to PERSON or ORG.
    """

    def __init__(self, entries: dict[str, str]):
        for surface, label in entries.items():
            if label not in (PERSON, ORG):
                raise ConfigError(f"gazetteer label for {surface!r} must be PERSON or ORG")
            if not surface.strip():
                raise ConfigError("gazetteer contains an empty surface")
        self.entries = dict(entries)
        self._compiled = [
            (re.compile(r"\b" + re.escape(surface) + r"\b", re.IGNORECASE), label)
            for surface, label in sorted(self.entries.items())
        ]

    @classmethod
    def from_file(cls, path: str | Path) -> "GazetteerRecognizer":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"gazetteer file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed gazetteer JSON: {path} ({e})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"gazetteer must be a JSON object: {path}")
        return cls(data)

    @property
    def identifier(self) -> str:
        return f"gazetteer-v1:{len(self.entries)} entries"

    def recognize(self, text: str) -> list[EntitySpan]:
        spans = []
        for pattern, label in self._compiled:
            for m in pattern.finditer(text):
                spans.append(EntitySpan(m.group(), label, m.start(), m.end()))
        spans.sort(key=lambda s: (s.start, s.end))
        return spans


class SpacyRecognizer(EntityRecognizer):
    """Adapter over a spaCy pipeline; needs the optional ``ner`` extra."""

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy
        except ImportError as e:
            raise RecognizerError(f"spacy is not installed: {e}") from None
        try:
            self._nlp = spacy.load(model)
        except Exception as e:
            raise RecognizerError(f"could not load spaCy model {model!r}: {e}") from e
        self.model = model

    @property
    def identifier(self) -> str:
        return f"spacy:{self.model}"

    def recognize(self, text: str) -> list[EntitySpan]:
        try:
            doc = self._nlp(text)
        except Exception as e:
            raise RecognizerError(f"{self.identifier}: {e}") from e
        out = []
        for ent in doc.ents:
            label = ent.label_ if ent.label_ in (PERSON, ORG) else OTHER
            out.append(EntitySpan(ent.text, label, ent.start_char, ent.end_char))
        return out


@dataclass(frozen=True)
class EntityHallucinationReport:
    """Generated/supported/hallucinated entity sets and the resulting score."""

    generated: frozenset[str]
    supported: frozenset[str]
    hallucinated: frozenset[str]
    score: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "generated": sorted(self.generated),
            "supported": sorted(self.supported),
            "hallucinated": sorted(self.hallucinated),
            "score": self.score,
        }


def no_hallucination(
    recognizer: EntityRecognizer, paper: PaperDoc, story: Story
) -> EntityHallucinationReport:
    """Score PERSON/ORG entity support of the story against the paper.

    An entity counts as supported when its normalized form matches a
    normalized paper entity or occurs inside the normalized paper text; with
    no entities at all there is nothing to hallucinate and the score is 1.
    """
    generated = {
        norm
        for span in recognizer.recognize(story.full_text)
        if span.label in (PERSON, ORG) and (norm := normalize_entity(span.surface))
    }
    if not generated:
        return EntityHallucinationReport(frozenset(), frozenset(), frozenset(), 1.0)
    paper_entities = {
        norm
        for span in recognizer.recognize(paper.text)
        if span.label in (PERSON, ORG) and (norm := normalize_entity(span.surface))
    }
    paper_norm = normalize_entity(paper.text)
    supported = {g for g in generated if g in paper_entities or g in paper_norm}
    hallucinated = generated - supported
    return EntityHallucinationReport(
        generated=frozenset(generated),
        supported=frozenset(supported),
        hallucinated=frozenset(hallucinated),
        score=1.0 - len(hallucinated) / len(generated),
    )


@dataclass(frozen=True)
class ProxyReport:
    """Capitalized-word proxy output: noisy on purpose, kept for comparison."""

    flagged: tuple[str, ...]
    candidates: int
    skip_sentence_initial: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "flagged": list(self.flagged),
            "candidates": self.candidates,
            "skip_sentence_initial": self.skip_sentence_initial,
        }


def capitalized_proxy(
    paper: PaperDoc, story: Story, skip_sentence_initial: bool = False
) -> ProxyReport:
    """Flag story words starting with a capital letter that the paper never uses.

    Deliberately crude: abbreviations, plural variants, and capitalized
    emphasis all produce false positives. ``skip_sentence_initial`` drops the
    first word of each sentence from consideration.
    """
    text = story.full_text
    vocab = set(tokenize(paper.text))
    initial_offsets = set()
    if skip_sentence_initial:
        for sent in split_sentences(text):
            m = _CASED_WORD.search(sent.text)
            if m:
                initial_offsets.add(sent.start + m.start())

    flagged: list[str] = []
    seen: set[str] = set()
    candidates = 0
    for m in _CASED_WORD.finditer(text):
        word = m.group()
        if not word[0].isupper():
            continue
        if skip_sentence_initial and m.start() in initial_offsets:
            continue
        candidates += 1
        lowered = word.lower()
        if lowered in vocab or lowered in seen:
            continue
        seen.add(lowered)
        flagged.append(word)
    return ProxyReport(
        flagged=tuple(flagged),
        candidates=candidates,
        skip_sentence_initial=skip_sentence_initial,
    )


def extract_technical_tokens(
    text: str,
    capitalized: bool = True,
    acronyms: bool = True,
    numbers: bool = True,
) -> list[str]:
    """Candidate fact-bearing tokens: capitalized words, acronyms, numbers.

    Deduplicated, first-occurrence order. Hyphenated compounds contribute
    their parts, so the acronym in "FM-based" is seen as "FM".
    """
    out: list[str] = []
    seen: set[str] = set()
    for m in _TECH.finditer(text):
        tok = m.group()
        if tok in seen:
            continue
        if tok[0].isdigit():
            keep = numbers
        elif len(tok) >= 2 and tok.isupper():
            keep = acronyms or capitalized
        else:
            keep = capitalized and tok[0].isupper()
        if keep:
            seen.add(tok)
            out.append(tok)
    return out


@dataclass(frozen=True)
class HHDConfig:
    """Retrieval-grounded detection knobs: depth, cosine floor, token classes."""

    k: int = 5
    threshold: float = 0.5
    capitalized: bool = True
    acronyms: bool = True
    numbers: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"retrieval depth k must be >= 1, got {self.k}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class HHDDecision:
    token: str
    host_sentence: str
    contained: bool
    best_similarity: float
    flagged: bool
    retrieved: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "token": self.token,
            "host_sentence": self.host_sentence,
            "contained": self.contained,
            "best_similarity": self.best_similarity,
            "flagged": self.flagged,
            "retrieved": [{"sentence": s, "similarity": v} for s, v in self.retrieved],
        }


@dataclass(frozen=True)
class HHDReport:
    decisions: tuple[HHDDecision, ...]
    k: int
    threshold: float
    backend_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "threshold": self.threshold,
            "backend": self.backend_id,
            "decisions": [d.to_dict() for d in self.decisions],
        }


def hhd_detect(
    backend: EmbeddingBackend,
    index: SentenceIndex,
    story: Story,
    cfg: HHDConfig | None = None,
) -> HHDReport:
    """Flag technical tokens unsupported by retrieved paper context.

    For each token (host = the first story sentence containing it) the top-k
    paper sentences are retrieved; the token is flagged only when it appears
    in none of them AND the best retrieval similarity is below the threshold.
    Every decision is reported with its evidence either way.
    """
    cfg = cfg or HHDConfig()
    decisions = []
    seen: set[str] = set()
    for sent in split_sentences(story.full_text):
        tokens = extract_technical_tokens(
            sent.text,
            capitalized=cfg.capitalized,
            acronyms=cfg.acronyms,
            numbers=cfg.numbers,
        )
        if not tokens or all(t in seen for t in tokens):
            continue
        hits = top_k_sentences(index, sent.text, cfg.k, backend)
        best = hits[0][1]
        for tok in tokens:
            if tok in seen:
                continue
            seen.add(tok)
            contained = any(tok.lower() in s.lower() for s, _ in hits)
            decisions.append(
                HHDDecision(
                    token=tok,
                    host_sentence=sent.text,
                    contained=contained,
                    best_similarity=best,
                    flagged=(not contained) and best < cfg.threshold,
                    retrieved=tuple(hits),
                )
            )
    return HHDReport(
        decisions=tuple(decisions),
        k=cfg.k,
        threshold=cfg.threshold,
        backend_id=backend.identifier,
    )


class TextGenClient(ABC):
    """Minimal text-generation client used by the judge and rewrite detectors."""

    supports_concurrency: bool = False

    @property
    @abstractmethod
    def identifier(self) -> str: ...

    @abstractmethod
    def generate(self, prompt: str, max_length: int = 1024) -> str: ...


class HttpTextGenClient(TextGenClient):
    """POSTs {"prompt", "max_length"} as JSON and expects {"text": ...} back.

    The endpoint URL and optional bearer token come from environment
    variables so credentials never live in config files.
    """

    def __init__(
        self,
        endpoint_env: str = "STORYSCORE_TEXTGEN_ENDPOINT",
        api_key_env: str = "STORYSCORE_TEXTGEN_API_KEY",
        timeout: float = 60.0,
    ):
        import os

        endpoint = os.environ.get(endpoint_env)
        if not endpoint:
            raise ClientError(f"environment variable {endpoint_env} is not set")
        self.endpoint = endpoint
        self.api_key = os.environ.get(api_key_env)
        self.timeout = timeout

    @property
    def identifier(self) -> str:
        return f"http:{urlsplit(self.endpoint).netloc}"

    def generate(self, prompt: str, max_length: int = 1024) -> str:
        payload = json.dumps({"prompt": prompt, "max_length": max_length}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.endpoint, data=payload, headers=headers)
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = resp.read().decode("utf-8")
        except (TimeoutError, socket.timeout) as e:
            raise ClientTimeoutError(f"{self.identifier}: timed out after {self.timeout}s") from e
        except urllib.error.URLError as e:
            if isinstance(getattr(e, "reason", None), (TimeoutError, socket.timeout)):
                raise ClientTimeoutError(
                    f"{self.identifier}: timed out after {self.timeout}s"
                ) from e
            raise TransportError(f"{self.identifier}: {e}") from e
        try:
            data = json.loads(body)
            return data["text"]
        except (json.JSONDecodeError, TypeError, KeyError):
            raise TransportError(f"{self.identifier}: malformed response payload") from None


@dataclass(frozen=True)
class JudgeVerdict:
    """Structured judge output; ``raw`` always preserves the original reply."""

    faithfulness: float
    hallucinated_entities: tuple[str, ...]
    numerical_errors: tuple[str, ...]
    raw: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "faithfulness": self.faithfulness,
            "hallucinated_entities": list(self.hallucinated_entities),
            "numerical_errors": list(self.numerical_errors),
            "raw": self.raw,
        }


def default_judge_template() -> str:
    return resources.files("storyscore.data").joinpath("judge_prompt.txt").read_text("utf-8")


def load_judge_template(path: str | Path | None = None) -> str:
    if path is None:
        return default_judge_template()
    template = Path(path).read_text(encoding="utf-8")
    for placeholder in ("{{CONTEXT}}", "{{ANSWER}}"):
        if placeholder not in template:
            raise ConfigError(f"judge template {path} is missing {placeholder}")
    return template


def _extract_json_object(text: str) -> dict[str, Any]:
    stripped = text.strip()
    try:
        obj = json.loads(stripped)
        if isinstance(obj, dict):
            return obj
    except json.JSONDecodeError:
        pass
    start, end = stripped.find("{"), stripped.rfind("}")
    if start != -1 and end > start:
        try:
            obj = json.loads(stripped[start : end + 1])
            if isinstance(obj, dict):
                return obj
        except json.JSONDecodeError:
            pass
    raise VerdictParseError("judge response contains no parseable JSON object")


def _string_list(obj: dict[str, Any], key: str) -> tuple[str, ...]:
    value = obj.get(key)
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise VerdictSchemaError(key, f"verdict field {key!r} must be a list of strings")
    return tuple(value)


def parse_verdict(raw: str) -> JudgeVerdict:
    """Validate a judge reply; nothing is defaulted, every field is checked."""
    obj = _extract_json_object(raw)
    if "faithfulness" not in obj:
        raise VerdictSchemaError("faithfulness", "verdict is missing field 'faithfulness'")
    faith = obj["faithfulness"]
    if isinstance(faith, bool) or not isinstance(faith, (int, float)):
        raise VerdictSchemaError("faithfulness", "verdict field 'faithfulness' must be a number")
    if not 0.0 <= float(faith) <= 1.0:
        raise VerdictSchemaError(
            "faithfulness", f"verdict field 'faithfulness' must be in [0, 1], got {faith}"
        )
    for key in ("hallucinated_entities", "numerical_errors"):
        if key not in obj:
            raise VerdictSchemaError(key, f"verdict is missing field {key!r}")
    return JudgeVerdict(
        faithfulness=float(faith),
        hallucinated_entities=_string_list(obj, "hallucinated_entities"),
        numerical_errors=_string_list(obj, "numerical_errors"),
        raw=raw,
    )


def judge_detect(
    client: TextGenClient,
    paper: PaperDoc,
    story: Story,
    template: str | None = None,
    max_length: int = 1024,
) -> JudgeVerdict:
    """Ask a text-generation model for a structured hallucination verdict.

    The paper goes in as CONTEXT and the story as ANSWER; the reply must be a
    JSON object with faithfulness, hallucinated_entities, numerical_errors.
    """
    template = template if template is not None else default_judge_template()
    prompt = template.replace("{{CONTEXT}}", paper.text).replace("{{ANSWER}}", story.full_text)
    raw = client.generate(prompt, max_length=max_length)
    return parse_verdict(raw)


REWRITE_TEMPLATE = (
    "Rewrite the following passage in different words. Keep every fact, name,"
    " and number intact.\n\nPASSAGE:\n{{PASSAGE}}\n\nREWRITE:"
)


@dataclass(frozen=True)
class RewriteEntry:
    section: int
    token: str
    stability: float
    flagged: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "section": self.section,
            "token": self.token,
            "stability": self.stability,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class RewriteReport:
    entries: tuple[RewriteEntry, ...]
    rewrites: int
    stability_floor: float
    client_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "rewrites": self.rewrites,
            "stability_floor": self.stability_floor,
            "client": self.client_id,
            "entries": [e.to_dict() for e in self.entries],
        }


def rewrite_consistency(
    client: TextGenClient,
    story: Story,
    m: int,
    stability_floor: float = 0.5,
    max_length: int = 1024,
) -> RewriteReport:
    """Measure concept stability across m machine rewrites of each section.

    A technical token that survives few rewrites is suspect; one that appears
    in all of them is probably grounded. Known to over-flag analogies and
    audience-level simplification, so it reports fractions, not a score.
    """
    if m < 2:
        raise ValueError(f"rewrite count m must be >= 2, got {m}")
    if not 0.0 <= stability_floor <= 1.0:
        raise ValueError(f"stability floor must be in [0, 1], got {stability_floor}")
    entries = []
    for idx, section in enumerate(story.sections):
        if not section.body.strip():
            continue
        prompt = REWRITE_TEMPLATE.replace("{{PASSAGE}}", section.body)
        rewrites = [client.generate(prompt, max_length=max_length).lower() for _ in range(m)]
        for tok in extract_technical_tokens(section.body):
            stability = sum(tok.lower() in rw for rw in rewrites) / m
            entries.append(
                RewriteEntry(
                    section=idx,
                    token=tok,
                    stability=stability,
                    flagged=stability < stability_floor,
                )
            )
    return RewriteReport(
        entries=tuple(entries),
        rewrites=m,
        stability_floor=stability_floor,
        client_id=client.identifier,
    )


def load_gazetteer(path: str | Path) -> GazetteerRecognizer:
    """Convenience alias for :meth:`GazetteerRecognizer.from_file`."""
    return GazetteerRecognizer.from_file(path)
