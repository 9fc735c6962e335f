"""Scoring and hallucination diagnostics for AI-generated scientific stories.

The composite score aggregates six unit-interval components: context recall,
embedding-alignment F1, prompt cleanliness, title coverage, redundancy
avoidance, and entity-level hallucination control. A pluggable detector suite
(capitalized-word proxy, retrieval-grounded HHD, judge client, rewrite
consistency) emits evidence alongside the numbers.
"""

from .corpus import (
    EvalItem,
    EvaluationSet,
    Outline,
    PaperDoc,
    Section,
    Story,
    load_evaluation_set,
    load_outline,
    load_paper,
    load_story,
    story_to_markdown,
)
from .config import EvalConfig, load_config
from .errors import StoryScoreError
from .hallucination import (
    EntityHallucinationReport,
    GazetteerRecognizer,
    HHDConfig,
    SpacyRecognizer,
    capitalized_proxy,
    extract_technical_tokens,
    hhd_detect,
    judge_detect,
    no_hallucination,
    normalize_entity,
    rewrite_consistency,
)
from .lexical import MetricValue, context_recall, no_redundancy
from .report import (
    ComparisonTable,
    StoryReport,
    build_comparison,
    read_story_report,
    write_batch_csv,
    write_story_report,
)
from .score import (
    COMPONENTS,
    MetricBreakdown,
    WeightConfig,
    evaluate_story,
    story_score,
)
from .semantic import (
    HashEmbeddingBackend,
    SentenceTransformerBackend,
    bertscore,
    build_sentence_index,
    top_k_sentences,
)
from .structural import PatternSet, count_contamination, prompt_cleanliness, title_coverage
from .textkit import (
    load_stopwords,
    ngrams,
    split_sentences,
    string_similarity,
    token_set,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "COMPONENTS",
    "ComparisonTable",
    "EntityHallucinationReport",
    "EvalConfig",
    "EvalItem",
    "EvaluationSet",
    "GazetteerRecognizer",
    "HHDConfig",
    "HashEmbeddingBackend",
    "MetricBreakdown",
    "MetricValue",
    "Outline",
    "PaperDoc",
    "PatternSet",
    "Section",
    "SentenceTransformerBackend",
    "SpacyRecognizer",
    "Story",
    "StoryReport",
    "StoryScoreError",
    "WeightConfig",
    "bertscore",
    "build_comparison",
    "build_sentence_index",
    "capitalized_proxy",
    "context_recall",
    "count_contamination",
    "evaluate_story",
    "extract_technical_tokens",
    "hhd_detect",
    "judge_detect",
    "load_config",
    "load_evaluation_set",
    "load_outline",
    "load_paper",
    "load_story",
    "load_stopwords",
    "ngrams",
    "no_hallucination",
    "no_redundancy",
    "normalize_entity",
    "prompt_cleanliness",
    "read_story_report",
    "rewrite_consistency",
    "split_sentences",
    "story_score",
    "story_to_markdown",
    "string_similarity",
    "title_coverage",
    "token_set",
    "tokenize",
    "top_k_sentences",
    "write_batch_csv",
    "write_story_report",
]
