"""Command-line surface: eval one triple, batch a manifest, compare, detect."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import corpus
from .config import EvalConfig, load_config
from .errors import StoryScoreError
from .hallucination import capitalized_proxy, hhd_detect, judge_detect, rewrite_consistency
from .report import (
    StoryReport,
    build_comparison,
    read_story_report,
    write_batch_csv,
    write_story_report,
)
from .score import evaluate_story
from .semantic import build_sentence_index

DETECTORS = ("entities", "proxy", "hhd", "judge", "rewrite")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyscore",
        description="Score AI-generated scientific stories against their source papers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one paper/story/outline triple")
    p_eval.add_argument("--paper", required=True, help="paper text/markdown file")
    p_eval.add_argument("--story", required=True, help="story markdown file")
    p_eval.add_argument("--outline", required=True, help="outline JSON file")
    p_eval.add_argument("--config", help="config JSON file")
    p_eval.add_argument("--out", help="write the report here instead of stdout")
    p_eval.add_argument("--figure", help="also render a component bar chart to this PNG")
    p_eval.add_argument(
        "--detectors",
        default="",
        help="extra detectors to run, comma-separated: proxy,hhd,judge,rewrite",
    )

    p_batch = sub.add_parser("batch", help="evaluate every triple in a manifest")
    p_batch.add_argument("--manifest", required=True, help="manifest JSON file")
    p_batch.add_argument("--out", required=True, help="output directory")
    p_batch.add_argument("--config", help="config JSON file")
    p_batch.add_argument("--detectors", default="", help="extra detectors, comma-separated")
    p_batch.add_argument(
        "--no-figures", action="store_true", help="skip the PNG next to the CSV"
    )

    p_cmp = sub.add_parser("compare", help="aggregate report directories into one table")
    p_cmp.add_argument("dirs", nargs="+", help="directories of report JSON files")
    p_cmp.add_argument("--out", help="also write the table as CSV here")
    p_cmp.add_argument(
        "--no-figures", action="store_true", help="skip the PNG next to the CSV"
    )

    p_det = sub.add_parser("detect", help="run a single detector and emit its evidence")
    p_det.add_argument("--detector", required=True, choices=DETECTORS)
    p_det.add_argument("--paper", required=True)
    p_det.add_argument("--story", required=True)
    p_det.add_argument("--config", help="config JSON file")
    p_det.add_argument("--out", help="write evidence JSON here instead of stdout")
    p_det.add_argument(
        "--skip-sentence-initial",
        action="store_true",
        help="proxy only: ignore the first word of each sentence",
    )
    return parser


def _parse_detectors(arg: str) -> list[str]:
    names = [n.strip() for n in arg.split(",") if n.strip()]
    for n in names:
        if n not in DETECTORS:
            raise StoryScoreError(f"unknown detector {n!r}; choose from {', '.join(DETECTORS)}")
    return names


def _run_detectors(
    names: Sequence[str],
    cfg: EvalConfig,
    paper: corpus.PaperDoc,
    story: corpus.Story,
    backend,
) -> dict:
    out = {}
    if "proxy" in names:
        out["proxy"] = capitalized_proxy(paper, story).to_dict()
    if "hhd" in names:
        index = build_sentence_index(backend, paper)
        out["hhd"] = hhd_detect(backend, index, story, cfg.hhd).to_dict()
    if "judge" in names:
        client = cfg.make_client()
        out["judge"] = judge_detect(client, paper, story, template=cfg.judge_template()).to_dict()
    if "rewrite" in names:
        client = cfg.make_client()
        out["rewrite"] = rewrite_consistency(
            client, story, cfg.rewrite_m, stability_floor=cfg.stability_floor
        ).to_dict()
    return out


def _evaluate_triple(
    cfg: EvalConfig,
    item: corpus.EvalItem,
    backend,
    recognizer,
    detectors: Sequence[str],
    group: str | None = None,
) -> StoryReport:
    breakdown = evaluate_story(
        item.paper,
        item.story,
        item.outline,
        backend=backend,
        recognizer=recognizer,
        weights=cfg.weights,
        patterns=cfg.make_patterns(),
        ngram_n=cfg.ngram_n,
        stopwords=cfg.make_stopwords(),
    )
    detector_out = {"entities": dict(breakdown.no_hallucination.details)}
    detector_out.update(_run_detectors(detectors, cfg, item.paper, item.story, backend))
    snapshot = cfg.snapshot(backend=backend, recognizer=recognizer)
    if group is not None:
        snapshot["group"] = group
    return StoryReport(
        story_id=item.story.id,
        paper_id=item.paper.id,
        scores=breakdown,
        detectors=detector_out,
        config=snapshot,
    )


def _cmd_eval(args) -> int:
    cfg = load_config(args.config)
    stopwords = cfg.make_stopwords()
    paper = corpus.load_paper(args.paper, stopwords=stopwords)
    story = corpus.load_story(args.story, paper_id=paper.id)
    outline = corpus.load_outline(args.outline)
    backend = cfg.make_backend()
    recognizer = cfg.make_recognizer()
    report = _evaluate_triple(
        cfg,
        corpus.EvalItem(paper, story, outline),
        backend,
        recognizer,
        _parse_detectors(args.detectors),
    )
    if args.out:
        write_story_report(report, args.out)
    else:
        print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    if args.figure:
        from .figures import save_breakdown_figure

        save_breakdown_figure([report], args.figure)
    return 0


def _cmd_batch(args) -> int:
    cfg = load_config(args.config)
    eval_set = corpus.load_evaluation_set(args.manifest, stopwords=cfg.make_stopwords())
    backend = cfg.make_backend()
    recognizer = cfg.make_recognizer()
    detectors = _parse_detectors(args.detectors)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for item in eval_set.items:
        report = _evaluate_triple(
            cfg, item, backend, recognizer, detectors, group=eval_set.group
        )
        write_story_report(report, out_dir / f"{report.story_id}.json")
        reports.append(report)
    csv_path = write_batch_csv(reports, out_dir / "scores.csv")
    if not args.no_figures:
        from .figures import save_breakdown_figure

        save_breakdown_figure(reports, csv_path.with_suffix(".png"))
    print(f"wrote {len(reports)} reports and {csv_path}", file=sys.stderr)
    return 0


def _group_label(dir_path: Path, reports: Sequence[StoryReport]) -> str:
    labels = {r.config.get("group") for r in reports}
    if len(labels) == 1 and isinstance((label := labels.pop()), str) and label:
        return label
    return dir_path.name


def _cmd_compare(args) -> int:
    groups = []
    for d in args.dirs:
        dir_path = Path(d)
        paths = sorted(dir_path.glob("*.json"))
        reports = [read_story_report(p) for p in paths]
        if not reports:
            raise StoryScoreError(f"no report JSON files in {dir_path}")
        groups.append((_group_label(dir_path, reports), [r.scores for r in reports]))
    table = build_comparison(groups)
    sys.stdout.write(table.render_text())
    if args.out:
        csv_path = table.write_csv(args.out)
        if not args.no_figures:
            from .figures import save_comparison_figure

            save_comparison_figure(table, csv_path.with_suffix(".png"))
    return 0


def _cmd_detect(args) -> int:
    cfg = load_config(args.config)
    stopwords = cfg.make_stopwords()
    paper = corpus.load_paper(args.paper, stopwords=stopwords)
    story = corpus.load_story(args.story, paper_id=paper.id)

    name = args.detector
    if name == "entities":
        from .hallucination import no_hallucination

        recognizer = cfg.make_recognizer()
        evidence = {
            **no_hallucination(recognizer, paper, story).to_dict(),
            "recognizer": recognizer.identifier,
        }
    elif name == "proxy":
        evidence = capitalized_proxy(
            paper, story, skip_sentence_initial=args.skip_sentence_initial
        ).to_dict()
    else:
        backend = cfg.make_backend()
        evidence = _run_detectors([name], cfg, paper, story, backend)[name]

    payload = json.dumps({name: evidence}, indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return 0


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Entry point returning an exit code: 0 ok, 1 evaluation error, 2 usage."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "batch":
            return _cmd_batch(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_detect(args)
    except StoryScoreError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
