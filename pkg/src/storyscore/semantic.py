"""Embedding-backed semantic scoring and the sentence-retrieval index."""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import PaperDoc, Story
from .errors import BackendError, MetricError
from .lexical import MetricValue
from .textkit import tokenize

# Fraction of each embedding window shared with its neighbor when a text
# exceeds the backend's token budget.
WINDOW_OVERLAP = 0.25


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Per-token vectors aligned with their token surfaces."""

    tokens: tuple[str, ...]
    vectors: np.ndarray  # shape (len(tokens), dim)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1]) if self.vectors.size else 0


class EmbeddingBackend(ABC):
    """Deterministic text-embedding provider.

    ``sentence_embed`` must return unit-norm rows; ``token_embed`` rows are
    normalized by the caller before cosine alignment. ``max_tokens`` is the
    word budget a single ``token_embed`` call is trusted with.
    """

    supports_concurrency: bool = False
    max_tokens: int = 512

    @property
    @abstractmethod
    def identifier(self) -> str:
        """Stable name/version string recorded in reports."""

    @abstractmethod
    def token_embed(self, text: str) -> EmbeddingMatrix: ...

    @abstractmethod
    def sentence_embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashEmbeddingBackend(EmbeddingBackend):
    """Deterministic pseudo-random embeddings keyed by token surface.

    Each token maps to a fixed unit vector derived from a seeded hash; a
    sentence embeds as the normalized sum of its token vectors. No model
    weights, no downloads, bitwise reproducible: meant for tests and CI.
    """

    supports_concurrency = True

    def __init__(self, seed: int = 0, dim: int = 64, max_tokens: int = 512):
        if dim < 2:
            raise BackendError(f"embedding dim must be >= 2, got {dim}")
        self.seed = seed
        self.dim = dim
        self.max_tokens = max_tokens
        self._cache: dict[str, np.ndarray] = {}

    @property
    def identifier(self) -> str:
        return f"hash-v1:seed={self.seed}:dim={self.dim}"

    def _vector(self, key: str) -> np.ndarray:
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self.seed}\x00{key}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        v = rng.standard_normal(self.dim)
        v /= np.linalg.norm(v)
        self._cache[key] = v
        return v

    def token_embed(self, text: str) -> EmbeddingMatrix:
        tokens = tokenize(text)
        if not tokens:
            return EmbeddingMatrix(tokens=(), vectors=np.zeros((0, self.dim)))
        vectors = np.stack([self._vector("tok:" + t) for t in tokens])
        return EmbeddingMatrix(tokens=tuple(tokens), vectors=vectors)

    def sentence_embed(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            tokens = tokenize(text)
            if tokens:
                v = np.sum([self._vector("tok:" + t) for t in tokens], axis=0)
                norm = np.linalg.norm(v)
                if norm < 1e-12:
                    v = self._vector("raw:" + text)
                else:
                    v = v / norm
            else:
                v = self._vector("raw:" + text)
            rows.append(v)
        return np.stack(rows) if rows else np.zeros((0, self.dim))


class SentenceTransformerBackend(EmbeddingBackend):
    """Adapter over a pretrained sentence-transformers model.

    Requires the optional ``sbert`` extra and a locally available model;
    loading failures surface as ``BackendError`` so callers can fall back.
    """

    supports_concurrency = False

    def __init__(self, model_name: str = "sentence-transformers/all-MiniLM-L6-v2",
                 max_tokens: int = 256):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as e:
            raise BackendError(f"sentence-transformers is not installed: {e}") from None
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as e:
            raise BackendError(f"could not load model {model_name!r}: {e}") from e
        self.model_name = model_name
        self.max_tokens = max_tokens

    @property
    def identifier(self) -> str:
        return f"sbert:{self.model_name}"

    def token_embed(self, text: str) -> EmbeddingMatrix:
        try:
            emb = self._model.encode(text, output_value="token_embeddings", convert_to_numpy=True)
            ids = self._model.tokenizer(text, truncation=True)["input_ids"]
            surfaces = self._model.tokenizer.convert_ids_to_tokens(ids)
        except Exception as e:
            raise BackendError(f"{self.identifier}: token embedding failed: {e}") from e
        emb = np.asarray(emb, dtype=np.float64)
        if len(surfaces) != len(emb):
            surfaces = [f"tok{i}" for i in range(len(emb))]
        # Specials carry no alignable surface content.
        keep = [i for i, s in enumerate(surfaces) if s not in ("[CLS]", "[SEP]", "<s>", "</s>")]
        return EmbeddingMatrix(
            tokens=tuple(surfaces[i] for i in keep), vectors=emb[keep] if len(keep) else emb[:0]
        )

    def sentence_embed(self, texts: Sequence[str]) -> np.ndarray:
        try:
            out = self._model.encode(list(texts), convert_to_numpy=True,
                                     normalize_embeddings=True)
        except Exception as e:
            raise BackendError(f"{self.identifier}: sentence embedding failed: {e}") from e
        return np.asarray(out, dtype=np.float64)


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


def _embed_windowed(backend: EmbeddingBackend, text: str) -> tuple[EmbeddingMatrix, int]:
    """Token-embed arbitrarily long text in overlapping word windows."""
    words = tokenize(text)
    size = backend.max_tokens
    if len(words) <= size:
        return backend.token_embed(text), 1
    step = max(1, size - int(size * WINDOW_OVERLAP))
    windows = []
    start = 0
    while True:
        windows.append(" ".join(words[start : start + size]))
        if start + size >= len(words):
            break
        start += step
    tokens: list[str] = []
    chunks = []
    for w in windows:
        m = backend.token_embed(w)
        tokens.extend(m.tokens)
        if len(m):
            chunks.append(m.vectors)
    vectors = np.concatenate(chunks) if chunks else np.zeros((0, 0))
    return EmbeddingMatrix(tokens=tuple(tokens), vectors=vectors), len(windows)


def _chunked_best_similarities(h: np.ndarray, r: np.ndarray, chunk: int = 512):
    """Row-wise and column-wise max cosine over h @ r.T without materializing it."""
    h_best_parts = []
    r_best = np.full(len(r), -1.0)
    for i in range(0, len(h), chunk):
        sims = h[i : i + chunk] @ r.T
        h_best_parts.append(sims.max(axis=1))
        r_best = np.maximum(r_best, sims.max(axis=0))
    return np.concatenate(h_best_parts), r_best


def bertscore(backend: EmbeddingBackend, story: Story, paper: PaperDoc) -> MetricValue:
    """Greedy cosine-alignment F1 between story and paper token embeddings.

    Precision averages each story token's best match against the paper;
    recall averages each paper token's best match against the story. Negative
    cosines are clamped to zero so the score stays in the unit interval.
    """
    story_text = story.full_text
    if not story_text.strip():
        raise MetricError(f"bertscore: story {story.id!r} has empty text")
    if not paper.text.strip():
        raise MetricError(f"bertscore: paper {paper.id!r} has empty text")
    try:
        hyp, hyp_windows = _embed_windowed(backend, story_text)
        ref, ref_windows = _embed_windowed(backend, paper.text)
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(f"{backend.identifier}: {e}") from e
    if not len(hyp) or not len(ref):
        raise MetricError("bertscore: no tokens to align")

    h = _normalize_rows(np.asarray(hyp.vectors, dtype=np.float64))
    r = _normalize_rows(np.asarray(ref.vectors, dtype=np.float64))
    h_best, r_best = _chunked_best_similarities(h, r)
    precision = float(np.mean(np.clip(h_best, 0.0, None)))
    recall = float(np.mean(np.clip(r_best, 0.0, None)))
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return MetricValue(
        name="bertscore",
        value=f1,
        details={
            "precision": precision,
            "recall": recall,
            "story_windows": hyp_windows,
            "paper_windows": ref_windows,
            "story_tokens": len(hyp),
            "paper_tokens": len(ref),
            "backend": backend.identifier,
        },
    )


@dataclass(frozen=True)
class SentenceIndex:
    """Paper sentences with their unit-norm embeddings, in document order."""

    sentences: tuple[str, ...]
    vectors: np.ndarray
    backend_id: str

    def __len__(self) -> int:
        return len(self.sentences)


def build_sentence_index(backend: EmbeddingBackend, paper: PaperDoc) -> SentenceIndex:
    """Embed every paper sentence for top-k retrieval."""
    texts = tuple(s.text for s in paper.sentences)
    if not texts:
        raise MetricError(f"paper {paper.id!r} has no sentences to index")
    try:
        vectors = backend.sentence_embed(texts)
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(f"{backend.identifier}: {e}") from e
    return SentenceIndex(sentences=texts, vectors=np.asarray(vectors, dtype=np.float64),
                         backend_id=backend.identifier)


def top_k_sentences(
    index: SentenceIndex, query: str, k: int, backend: EmbeddingBackend
) -> list[tuple[str, float]]:
    """The k most cosine-similar indexed sentences, ties broken by document order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    try:
        q = backend.sentence_embed([query])[0]
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(f"{backend.identifier}: {e}") from e
    sims = index.vectors @ q
    order = np.argsort(-sims, kind="stable")[: min(k, len(index))]
    return [(index.sentences[i], float(sims[i])) for i in order]
