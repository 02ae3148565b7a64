"""Command-line entry point: ``lrst corpus|augment|eval|pipeline ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import augment, cascade, corpus as corpus_mod, metrics
from .adapters import open_adapter
from .errors import LrstError

CORPUS_ARGS = dict(
    name=None,
    split="train",
    src_lang="bem",
    tgt_lang="eng",
)


def _add_corpus_meta(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=corpus_mod.FORMATS, default="jsonl",
                        help="corpus file format (default: jsonl)")
    parser.add_argument("--name", default=None, help="corpus name (default: file stem)")
    parser.add_argument("--split", choices=corpus_mod.SPLITS, default="train")
    parser.add_argument("--src-lang", default="bem")
    parser.add_argument("--tgt-lang", default="eng")


def _load(path: str, args: argparse.Namespace, name: str | None = None):
    return corpus_mod.load_corpus(
        path,
        args.format,
        name=name if name is not None else args.name,
        split=args.split,
        src_lang=args.src_lang,
        tgt_lang=args.tgt_lang,
    )


def _cmd_corpus_stats(args) -> int:
    stats = corpus_mod.stats(_load(args.path, args))
    print(json.dumps(stats.to_dict(), indent=2))
    return 0


def _cmd_corpus_dedup(args) -> int:
    train = _load(args.path, args)
    held_out = [
        corpus_mod.load_corpus(
            p, args.format, split="test",
            src_lang=args.src_lang, tgt_lang=args.tgt_lang,
        )
        for p in args.against
    ]
    deduped, removed = corpus_mod.dedup_against(train, held_out, exact=args.exact_match)
    corpus_mod.write_corpus(deduped, args.out, args.out_format or args.format)
    print(f"removed {removed} overlapping utterances, kept {len(deduped)} -> {args.out}")
    return 0


def _cmd_corpus_merge(args) -> int:
    corpora = [_load(p, args, name=Path(p).stem) for p in args.paths]
    merged = corpus_mod.merge(corpora, name=args.name or "merged")
    corpus_mod.write_corpus(merged, args.out, args.out_format or args.format)
    print(f"merged {len(corpora)} corpora into {len(merged)} utterances -> {args.out}")
    return 0


def _cmd_corpus_convert(args) -> int:
    loaded = _load(args.path, args)
    corpus_mod.write_corpus(loaded, args.out, args.to)
    print(f"wrote {len(loaded)} utterances as {args.to} -> {args.out}")
    return 0


def _cmd_augment_backtranslate(args) -> int:
    mono = corpus_mod.load_corpus(
        args.path, args.format,
        split="train", src_lang=args.src_lang, tgt_lang=args.tgt_lang,
    )
    src, _, tgt = args.direction.partition("-")
    adapter = open_adapter(args.adapter)
    try:
        segments, rejects = augment.synthesize_bt_corpus(
            mono, adapter, (src, tgt),
            beam_size=args.beam_size, concurrency_limit=args.concurrency,
        )
    finally:
        adapter.close()
    augment.write_scored_segments(segments, args.out)
    if rejects:
        sidecar = str(args.out) + ".rejects.jsonl"
        Path(sidecar).write_text(
            "".join(
                json.dumps({"id": r.id, "text": r.text, "error": r.error},
                           ensure_ascii=False) + "\n"
                for r in rejects
            ),
            encoding="utf-8",
        )
        print(f"rejected {len(rejects)} segments -> {sidecar}", file=sys.stderr)
    print(f"back-translated {len(segments)} segments -> {args.out}")
    return 0


def _cmd_augment_filter(args) -> int:
    segments = augment.read_scored_segments(args.path)
    kept, removed = augment.filter_by_quality(segments, args.threshold)
    augment.write_scored_segments(kept, args.out)
    print(f"kept {len(kept)}, removed {removed} (threshold {args.threshold}) -> {args.out}")
    return 0


def _cmd_augment_tag(args) -> int:
    segments = augment.read_scored_segments(args.path)
    transform = augment.apply_bt_tag if args.apply else augment.strip_bt_tag
    out = [
        augment.ScoredSegment(
            source_text=transform(s.source_text, args.tag),
            target_text=s.target_text,
            avg_log_prob=s.avg_log_prob,
            quality=s.quality,
        )
        for s in segments
    ]
    augment.write_scored_segments(out, args.out)
    action = "tagged" if args.apply else "untagged"
    print(f"{action} {len(out)} segments -> {args.out}")
    return 0


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _cmd_eval(args) -> int:
    refs = _read_lines(args.refs)
    hyps = _read_lines(args.hyps)
    requested = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    comet = None
    if args.comet_file:
        payload = json.loads(Path(args.comet_file).read_text(encoding="utf-8"))
        if isinstance(payload, dict):
            comet = payload.get("comet", payload.get("system_score"))
        else:
            comet = float(payload)
    report = metrics.evaluate(
        refs, hyps, metrics=requested,
        wer_normalization=args.wer_norm, comet=comet,
    )
    width = max(len(k) for k in report.to_dict())
    for key, value in report.to_dict().items():
        if isinstance(value, float):
            value = f"{value:.2f}"
        elif isinstance(value, list):
            value = " / ".join(f"{v:.3f}" for v in value)
        print(f"{key:<{width}}  {value}")
    payload = json.dumps(report.to_dict(), indent=2)
    if args.json_out:
        Path(args.json_out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return 0


def _cmd_pipeline_run(args) -> int:
    config = cascade.load_config(args.config)
    loaded = corpus_mod.load_corpus(
        args.corpus, args.corpus_format,
        split=args.split, src_lang=args.src_lang, tgt_lang=args.tgt_lang,
    )
    runner = {
        "cascaded": cascade.run_cascaded,
        "end_to_end": cascade.run_end_to_end,
        "mt_only": cascade.run_mt_only,
    }[config.mode]
    report = runner(loaded, config)
    cascade.save_report(report, args.out)
    summary = report.metrics.to_dict() if report.metrics else {}
    print(
        f"{report.label}: evaluated {report.evaluated}, failed {report.failed}, "
        + ", ".join(
            f"{k} {v:.2f}" for k, v in summary.items()
            if isinstance(v, float) and k in ("bleu", "chrf_pp", "wer")
        )
    )
    print(f"report -> {args.out}")
    return 0


def _cmd_pipeline_compare(args) -> int:
    reports = [cascade.load_report(p) for p in args.reports]
    print(cascade.compare(reports, format=args.table_format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrst",
        description="Corpus engineering and evaluation for low-resource speech translation.",
    )
    top = parser.add_subparsers(dest="command", required=True)

    # corpus ----------------------------------------------------------------
    p_corpus = top.add_parser("corpus", help="ingest, dedup, merge, convert")
    sub = p_corpus.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("stats", help="counts for one corpus file")
    p.add_argument("path")
    _add_corpus_meta(p)
    p.set_defaults(func=_cmd_corpus_stats)

    p = sub.add_parser("dedup", help="remove train/held-out transcript overlap")
    p.add_argument("path", help="training corpus")
    p.add_argument("--against", nargs="+", required=True, metavar="HELD_OUT")
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=corpus_mod.FORMATS, default=None)
    p.add_argument("--exact-match", action="store_true",
                   help="match raw transcripts instead of normalized dedup keys")
    _add_corpus_meta(p)
    p.set_defaults(func=_cmd_corpus_dedup)

    p = sub.add_parser("merge", help="concatenate corpora sharing a language pair")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=corpus_mod.FORMATS, default=None)
    _add_corpus_meta(p)
    p.set_defaults(func=_cmd_corpus_merge)

    p = sub.add_parser("convert", help="rewrite a corpus in the other format")
    p.add_argument("path")
    p.add_argument("--out", required=True)
    p.add_argument("--to", choices=corpus_mod.FORMATS, required=True)
    _add_corpus_meta(p)
    p.set_defaults(func=_cmd_corpus_convert)

    # augment ---------------------------------------------------------------
    p_augment = top.add_parser("augment", help="back-translation synthesis and filtering")
    sub = p_augment.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("backtranslate", help="translate monolingual text, keep scores")
    p.add_argument("path", help="monolingual corpus (transcripts = target-language text)")
    p.add_argument("--adapter", required=True, help="adapter endpoint spec")
    p.add_argument("--out", required=True)
    p.add_argument("--direction", default="eng-bem", help="src-tgt pair (default: eng-bem)")
    p.add_argument("--format", choices=corpus_mod.FORMATS, default="jsonl")
    p.add_argument("--src-lang", default="eng")
    p.add_argument("--tgt-lang", default="eng")
    p.add_argument("--beam-size", type=int, default=5)
    p.add_argument("--concurrency", type=int, default=4)
    p.set_defaults(func=_cmd_augment_backtranslate)

    p = sub.add_parser("filter", help="drop segments below the quality threshold")
    p.add_argument("path", help="scored-segment JSONL")
    p.add_argument("--threshold", type=float, default=augment.DEFAULT_QUALITY_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_augment_filter)

    p = sub.add_parser("tag", help="apply or strip the synthetic-data tag")
    p.add_argument("path", help="scored-segment JSONL")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--apply", action="store_true")
    group.add_argument("--strip", action="store_true")
    p.add_argument("--tag", default=augment.BT_TAG)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_augment_tag)

    # eval ------------------------------------------------------------------
    p = top.add_parser("eval", help="score hypothesis files against references")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--metrics", default="bleu,chrf,wer")
    p.add_argument("--wer-norm", choices=metrics.WER_NORMALIZATIONS,
                   default="lowercase_nopunct")
    p.add_argument("--comet-file", default=None,
                   help="JSON file with an externally computed semantic score")
    p.add_argument("--json-out", default=None,
                   help="write the JSON report here instead of stdout")
    p.set_defaults(func=_cmd_eval)

    # pipeline --------------------------------------------------------------
    p_pipe = top.add_parser("pipeline", help="run and compare systems")
    sub = p_pipe.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run", help="run one system over a corpus")
    p.add_argument("--config", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--corpus-format", choices=corpus_mod.FORMATS, default="jsonl")
    p.add_argument("--split", choices=corpus_mod.SPLITS, default="test")
    p.add_argument("--src-lang", default="bem")
    p.add_argument("--tgt-lang", default="eng")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pipeline_run)

    p = sub.add_parser("compare", help="tabulate run reports side by side")
    p.add_argument("reports", nargs="+")
    p.add_argument("--format", dest="table_format",
                   choices=cascade.COMPARE_FORMATS, default="markdown")
    p.set_defaults(func=_cmd_pipeline_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LrstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
