"""Report emission: per-story JSON, batch CSV, and group comparison tables."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .errors import LoadError, StoryScoreError
from .score import COMPONENTS, MetricBreakdown

# Fixed column order for all delimited output: composite first, then the
# components, semantic before lexical, for side-by-side reading of results.
SCORE_COLUMNS = (
    "story_score",
    "bertscore",
    "context_recall",
    "prompt_cleanliness",
    "title_coverage",
    "no_redundancy",
    "no_hallucination",
)
CSV_COLUMNS = ("story_id", "paper_id") + SCORE_COLUMNS
COMPARISON_COLUMNS = ("group", "stories") + SCORE_COLUMNS


@dataclass(frozen=True)
class StoryReport:
    """Everything one evaluation produced, with provenance to rerun it."""

    story_id: str
    paper_id: str
    scores: MetricBreakdown
    detectors: dict[str, Any] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "story_id": self.story_id,
            "paper_id": self.paper_id,
            "scores": self.scores.to_dict(),
        }
        # Detector sections appear only when they actually ran.
        if self.detectors:
            out["detectors"] = self.detectors
        out["config"] = self.config
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StoryReport":
        return cls(
            story_id=data["story_id"],
            paper_id=data["paper_id"],
            scores=MetricBreakdown.from_dict(data["scores"]),
            detectors=dict(data.get("detectors", {})),
            config=dict(data.get("config", {})),
        )


def _dump(data: dict[str, Any]) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_story_report(report: StoryReport, path: str | Path) -> Path:
    """Write a report as JSON with stable key order; returns the path."""
    p = Path(path)
    try:
        p.write_text(_dump(report.to_dict()), encoding="utf-8")
    except OSError as e:
        raise StoryScoreError(f"cannot write report {p}: {e}") from e
    return p


def read_story_report(path: str | Path) -> StoryReport:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"report file not found: {p}") from None
    except json.JSONDecodeError as e:
        raise LoadError(f"malformed report JSON: {p} ({e})") from None
    try:
        return StoryReport.from_dict(data)
    except (KeyError, TypeError) as e:
        raise LoadError(f"report {p} is missing required fields: {e}") from None


def _score_row(report: StoryReport) -> dict[str, str]:
    values = report.scores.component_values()
    values["story_score"] = report.scores.story_score
    row = {"story_id": report.story_id, "paper_id": report.paper_id}
    for col in SCORE_COLUMNS:
        row[col] = f"{values[col]:.6f}"
    return row


def write_batch_csv(reports: Sequence[StoryReport], path: str | Path) -> Path:
    """One row per story, header always present, fixed column order."""
    p = Path(path)
    try:
        with p.open("w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for report in reports:
                writer.writerow(_score_row(report))
    except OSError as e:
        raise StoryScoreError(f"cannot write CSV {p}: {e}") from e
    return p


@dataclass(frozen=True)
class ComparisonRow:
    group: str
    count: int
    means: dict[str, float]  # keyed by SCORE_COLUMNS


@dataclass(frozen=True)
class ComparisonTable:
    """Per-group arithmetic means of the composite and every component."""

    rows: tuple[ComparisonRow, ...]

    def render_text(self) -> str:
        header = ["group", "stories"] + [c for c in SCORE_COLUMNS]
        widths = [max(len(h), 12) for h in header]
        widths[0] = max(len("group"), *(len(r.group) for r in self.rows))
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for r in self.rows:
            cells = [r.group.ljust(widths[0]), str(r.count).ljust(widths[1])]
            cells += [f"{r.means[c]:.3f}".ljust(w) for c, w in zip(SCORE_COLUMNS, widths[2:])]
            lines.append("  ".join(cells))
        return "\n".join(line.rstrip() for line in lines) + "\n"

    def write_csv(self, path: str | Path) -> Path:
        p = Path(path)
        try:
            with p.open("w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(COMPARISON_COLUMNS)
                for r in self.rows:
                    writer.writerow(
                        [r.group, r.count] + [f"{r.means[c]:.3f}" for c in SCORE_COLUMNS]
                    )
        except OSError as e:
            raise StoryScoreError(f"cannot write CSV {p}: {e}") from e
        return p


def build_comparison(
    groups: Sequence[tuple[str, Sequence[MetricBreakdown]]]
) -> ComparisonTable:
    """Aggregate evaluated groups into one table row each."""
    rows = []
    for label, breakdowns in groups:
        if not breakdowns:
            raise StoryScoreError(f"group {label!r} has no evaluated stories")
        means = {
            "story_score": sum(b.story_score for b in breakdowns) / len(breakdowns)
        }
        for name in COMPONENTS:
            means[name] = sum(getattr(b, name).value for b in breakdowns) / len(breakdowns)
        rows.append(ComparisonRow(group=label, count=len(breakdowns), means=means))
    return ComparisonTable(rows=tuple(rows))
