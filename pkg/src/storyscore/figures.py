"""Figure rendering for reports: component bars per story and per group."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import SCORE_COLUMNS, ComparisonTable, StoryReport

_LABELS = {
    "story_score": "StoryScore",
    "bertscore": "BERTScore",
    "context_recall": "Context Recall",
    "prompt_cleanliness": "Prompt Cleanliness",
    "title_coverage": "Title Coverage",
    "no_redundancy": "No Redundancy",
    "no_hallucination": "No Hallucination",
}


def save_comparison_figure(table: ComparisonTable, path: str | Path) -> Path:
    """Grouped bar chart: one bar cluster per metric, one color per group."""
    p = Path(path)
    n_metrics = len(SCORE_COLUMNS)
    n_groups = len(table.rows)
    width = 0.8 / max(1, n_groups)
    fig, ax = plt.subplots(figsize=(max(8, 1.4 * n_metrics), 4.5))
    for gi, row in enumerate(table.rows):
        xs = [m + gi * width for m in range(n_metrics)]
        ax.bar(
            xs,
            [row.means[c] for c in SCORE_COLUMNS],
            width=width,
            label=f"{row.group} (n={row.count})",
        )
    ax.set_xticks([m + width * (n_groups - 1) / 2 for m in range(n_metrics)])
    ax.set_xticklabels([_LABELS[c] for c in SCORE_COLUMNS], rotation=20, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("mean value")
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(p, dpi=120)
    plt.close(fig)
    return p


def save_breakdown_figure(reports: Sequence[StoryReport], path: str | Path) -> Path:
    """Per-story component bars; one cluster per story in the batch."""
    p = Path(path)
    n_metrics = len(SCORE_COLUMNS)
    n_stories = len(reports)
    width = 0.8 / max(1, n_stories)
    fig, ax = plt.subplots(figsize=(max(8, 1.4 * n_metrics), 4.5))
    for si, report in enumerate(reports):
        values = report.scores.component_values()
        values["story_score"] = report.scores.story_score
        xs = [m + si * width for m in range(n_metrics)]
        ax.bar(xs, [values[c] for c in SCORE_COLUMNS], width=width, label=report.story_id)
    ax.set_xticks([m + width * (n_stories - 1) / 2 for m in range(n_metrics)])
    ax.set_xticklabels([_LABELS[c] for c in SCORE_COLUMNS], rotation=20, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("value")
    ax.legend(fontsize="small")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(p, dpi=120)
    plt.close(fig)
    return p
