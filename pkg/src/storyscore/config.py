"""Run configuration: one JSON file pins everything a score depends on."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .hallucination import (
    EntityRecognizer,
    GazetteerRecognizer,
    HHDConfig,
    HttpTextGenClient,
    SpacyRecognizer,
    TextGenClient,
    load_judge_template,
)
from .score import WeightConfig
from .semantic import EmbeddingBackend, HashEmbeddingBackend, SentenceTransformerBackend
from .structural import PatternSet
from .textkit import load_stopwords

_KNOWN_KEYS = {
    "weights",
    "ngram_n",
    "hhd",
    "backend",
    "recognizer",
    "patterns_path",
    "stopwords_path",
    "judge_prompt_path",
    "rewrite_m",
    "stability_floor",
    "endpoint_env",
    "api_key_env",
}


@dataclass
class EvalConfig:
    """Everything needed to rerun an evaluation and get the same numbers."""

    weights: WeightConfig = field(default_factory=WeightConfig)
    ngram_n: int = 3
    hhd: HHDConfig = field(default_factory=HHDConfig)
    backend_name: str = "hash"
    backend_options: dict[str, Any] = field(default_factory=dict)
    recognizer_name: str = "gazetteer"
    recognizer_options: dict[str, Any] = field(default_factory=dict)
    patterns_path: str | None = None
    stopwords_path: str | None = None
    judge_prompt_path: str | None = None
    rewrite_m: int = 3
    stability_floor: float = 0.5
    endpoint_env: str = "STORYSCORE_TEXTGEN_ENDPOINT"
    api_key_env: str = "STORYSCORE_TEXTGEN_API_KEY"
    base_dir: Path = field(default_factory=Path)

    def _resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def make_patterns(self) -> PatternSet:
        resolved = self._resolve(self.patterns_path)
        return PatternSet.default() if resolved is None else PatternSet.from_file(resolved)

    def make_stopwords(self) -> frozenset[str] | None:
        resolved = self._resolve(self.stopwords_path)
        return None if resolved is None else load_stopwords(resolved)

    def make_backend(self) -> EmbeddingBackend:
        opts = dict(self.backend_options)
        if self.backend_name == "hash":
            return HashEmbeddingBackend(
                seed=int(opts.pop("seed", 0)),
                dim=int(opts.pop("dim", 64)),
                max_tokens=int(opts.pop("max_tokens", 512)),
            )
        if self.backend_name == "sbert":
            return SentenceTransformerBackend(
                model_name=opts.pop("model", "sentence-transformers/all-MiniLM-L6-v2"),
                max_tokens=int(opts.pop("max_tokens", 256)),
            )
        raise ConfigError(f"unknown embedding backend {self.backend_name!r}")

    def make_recognizer(self) -> EntityRecognizer:
        opts = dict(self.recognizer_options)
        if self.recognizer_name == "gazetteer":
            path = opts.get("path")
            if path is None:
                return GazetteerRecognizer({})
            return GazetteerRecognizer.from_file(self._resolve(path))
        if self.recognizer_name == "spacy":
            return SpacyRecognizer(model=opts.get("model", "en_core_web_sm"))
        raise ConfigError(f"unknown recognizer {self.recognizer_name!r}")

    def make_client(self, timeout: float = 60.0) -> TextGenClient:
        return HttpTextGenClient(
            endpoint_env=self.endpoint_env, api_key_env=self.api_key_env, timeout=timeout
        )

    def judge_template(self) -> str:
        return load_judge_template(self._resolve(self.judge_prompt_path))

    def snapshot(
        self,
        backend: EmbeddingBackend | None = None,
        recognizer: EntityRecognizer | None = None,
    ) -> dict[str, Any]:
        """Provenance block embedded in every report."""
        return {
            "weights": self.weights.as_dict(),
            "ngram_n": self.ngram_n,
            "hhd": {
                "k": self.hhd.k,
                "threshold": self.hhd.threshold,
                "capitalized": self.hhd.capitalized,
                "acronyms": self.hhd.acronyms,
                "numbers": self.hhd.numbers,
            },
            "backend": backend.identifier if backend is not None else self.backend_name,
            "recognizer": recognizer.identifier
            if recognizer is not None
            else self.recognizer_name,
            "patterns_sha": self.make_patterns().sha,
            "stopwords": self.stopwords_path or "bundled",
        }


def load_config(path: str | Path | None = None) -> EvalConfig:
    """Load a config JSON file; with no path, return the defaults."""
    if path is None:
        return EvalConfig()
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed config JSON: {p} ({e})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object: {p}")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    cfg = EvalConfig(base_dir=p.parent)
    if "weights" in data:
        cfg.weights = WeightConfig.from_dict(data["weights"])
    if "ngram_n" in data:
        cfg.ngram_n = int(data["ngram_n"])
    if "hhd" in data:
        hhd = data["hhd"]
        if not isinstance(hhd, dict):
            raise ConfigError("config key 'hhd' must be an object")
        cfg.hhd = HHDConfig(
            k=int(hhd.get("k", 5)),
            threshold=float(hhd.get("threshold", 0.5)),
            capitalized=bool(hhd.get("capitalized", True)),
            acronyms=bool(hhd.get("acronyms", True)),
            numbers=bool(hhd.get("numbers", True)),
        )
    if "backend" in data:
        backend = data["backend"]
        if not isinstance(backend, dict) or "name" not in backend:
            raise ConfigError("config key 'backend' must be an object with a 'name'")
        cfg.backend_name = backend["name"]
        cfg.backend_options = {k: v for k, v in backend.items() if k != "name"}
    if "recognizer" in data:
        rec = data["recognizer"]
        if not isinstance(rec, dict) or "name" not in rec:
            raise ConfigError("config key 'recognizer' must be an object with a 'name'")
        cfg.recognizer_name = rec["name"]
        cfg.recognizer_options = {k: v for k, v in rec.items() if k != "name"}
    for key in ("patterns_path", "stopwords_path", "judge_prompt_path"):
        if key in data:
            setattr(cfg, key, data[key])
    if "rewrite_m" in data:
        cfg.rewrite_m = int(data["rewrite_m"])
    if "stability_floor" in data:
        cfg.stability_floor = float(data["stability_floor"])
    for key in ("endpoint_env", "api_key_env"):
        if key in data:
            setattr(cfg, key, str(data[key]))
    return cfg
