"""Orchestration of cascaded, end-to-end, and MT-only evaluation runs.

A run sends every utterance of a corpus through an inference adapter
(transcribe-then-translate, direct audio translation, or text-only
translation), aggregates translation metrics against the reference
translations, and emits an immutable report. Per-utterance adapter
failures fail soft: the record is marked failed, excluded from the
aggregates, and counted, so failed + evaluated always equals the corpus
size. ``strict=True`` aborts on the first failure instead.

Reports are self-verifying: they store per-utterance hypotheses next to
their references, so the aggregate scores can be recomputed from the
report alone (:func:`recompute_aggregates`).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .adapters import open_adapter
from .augment import strip_bt_tag
from .corpus import Corpus, Utterance
from .errors import (
    AdapterProtocolError,
    AdapterResponseError,
    CapabilityError,
    ConfigError,
    CorpusIOError,
)
from .metrics import METRIC_NAMES, MetricReport, evaluate

__all__ = [
    "PipelineConfig",
    "UtteranceResult",
    "RunReport",
    "load_config",
    "run_cascaded",
    "run_end_to_end",
    "run_mt_only",
    "recompute_aggregates",
    "compare",
    "save_report",
    "load_report",
]

MODES = ("cascaded", "end_to_end", "mt_only")
TAG_POLICIES = ("keep", "strip")
COMPARE_FORMATS = ("markdown", "csv", "json")
DEFAULT_BEAM_SIZE = 5

CONFIG_KEYS = frozenset(
    {
        "mode",
        "adapter",
        "label",
        "beam_size",
        "tag_policy",
        "metrics",
        "concurrency_limit",
        "strict",
        "training_metadata",
    }
)

# which direction wins a comparison column
_HIGHER_IS_BETTER = {"BLEU": True, "chrF++": True, "COMET": True, "WER": False, "ASR WER": False}


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run needs; training_metadata is provenance only."""

    mode: str
    adapter: str
    label: str = ""
    beam_size: int = DEFAULT_BEAM_SIZE
    tag_policy: str = "strip"
    metrics: tuple[str, ...] = ("bleu", "chrf")
    concurrency_limit: int = 4
    strict: bool = False
    training_metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"bad mode {self.mode!r} (expected one of {MODES})")
        if not self.adapter:
            raise ConfigError("adapter endpoint spec must be non-empty")
        if not isinstance(self.beam_size, int) or self.beam_size < 1:
            raise ConfigError(f"beam_size must be an integer >= 1, got {self.beam_size!r}")
        if self.tag_policy not in TAG_POLICIES:
            raise ConfigError(f"bad tag_policy {self.tag_policy!r}")
        if not isinstance(self.concurrency_limit, int) or self.concurrency_limit < 1:
            raise ConfigError(
                f"concurrency_limit must be an integer >= 1, got {self.concurrency_limit!r}"
            )
        unknown = set(self.metrics) - set(METRIC_NAMES)
        if unknown:
            raise ConfigError(f"unknown metrics: {sorted(unknown)}")

    @property
    def system_label(self) -> str:
        return self.label or self.mode


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config JSON file, applying defaults."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: bad JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {unknown}")
    for key in ("mode", "adapter"):
        if key not in data:
            raise ConfigError(f"{path}: missing required key {key!r}")
    if "metrics" in data:
        data["metrics"] = tuple(data["metrics"])
    return PipelineConfig(**data)


@dataclass(frozen=True)
class UtteranceResult:
    """One per-utterance record of a run, references included."""

    id: str
    ref_translation: str | None = None
    hyp_translation: str | None = None
    ref_transcript: str | None = None
    hyp_transcript: str | None = None
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class RunReport:
    """Immutable result of one pipeline run."""

    label: str
    mode: str
    results: tuple[UtteranceResult, ...]
    metrics: MetricReport | None
    asr_metrics: MetricReport | None
    config: dict
    evaluated: int
    failed: int
    duration_seconds: float

    def results_fingerprint(self) -> dict:
        """Everything determinism guarantees cover: results and aggregates.

        Excludes wall-clock time and the config snapshot (which records
        the requested concurrency, allowed to differ between equivalent
        runs).
        """
        return {
            "label": self.label,
            "mode": self.mode,
            "results": [asdict(r) for r in self.results],
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "asr_metrics": self.asr_metrics.to_dict() if self.asr_metrics else None,
            "evaluated": self.evaluated,
            "failed": self.failed,
        }

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "mode": self.mode,
            "results": [asdict(r) for r in self.results],
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "asr_metrics": self.asr_metrics.to_dict() if self.asr_metrics else None,
            "config": self.config,
            "evaluated": self.evaluated,
            "failed": self.failed,
            "duration_seconds": self.duration_seconds,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            label=data["label"],
            mode=data["mode"],
            results=tuple(UtteranceResult(**r) for r in data["results"]),
            metrics=MetricReport.from_dict(data["metrics"]) if data.get("metrics") else None,
            asr_metrics=(
                MetricReport.from_dict(data["asr_metrics"])
                if data.get("asr_metrics")
                else None
            ),
            config=data.get("config", {}),
            evaluated=data["evaluated"],
            failed=data["failed"],
            duration_seconds=data.get("duration_seconds", 0.0),
        )


def save_report(report: RunReport, path: str | Path) -> None:
    try:
        Path(path).write_text(
            json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise CorpusIOError(f"cannot write {path}: {exc}") from exc


def load_report(path: str | Path) -> RunReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: bad JSON: {exc.msg}") from None
    return RunReport.from_dict(data)


def _require_mode(config: PipelineConfig, mode: str) -> None:
    if config.mode != mode:
        raise ConfigError(f"config mode is {config.mode!r}, expected {mode!r}")


def _require_non_empty(corpus: Corpus) -> None:
    if len(corpus.utterances) == 0:
        raise ValueError("empty corpus")


def _require_audio(corpus: Corpus) -> None:
    for utt in corpus.utterances:
        if utt.audio is None:
            raise ValueError(f"utterance {utt.id!r} carries no audio reference")


def _require_references(corpus: Corpus) -> None:
    for utt in corpus.utterances:
        if utt.translation is None:
            raise ValueError(
                f"utterance {utt.id!r} carries no reference translation"
            )


def _run(
    corpus: Corpus,
    config: PipelineConfig,
    adapter,
    worker: Callable[[Utterance], UtteranceResult],
    with_asr: bool,
) -> RunReport:
    started = time.perf_counter()
    caps = adapter.capabilities()

    results: list[UtteranceResult] = []
    with ThreadPoolExecutor(max_workers=config.concurrency_limit) as pool:
        futures = [pool.submit(worker, u) for u in corpus.utterances]
        for utt, future in zip(corpus.utterances, futures):
            try:
                results.append(future.result())
            except (AdapterResponseError, AdapterProtocolError, CapabilityError) as exc:
                if config.strict:
                    raise
                results.append(
                    UtteranceResult(
                        id=utt.id,
                        ref_translation=utt.translation,
                        ref_transcript=utt.transcript if with_asr else None,
                        failed=True,
                        error=str(exc),
                    )
                )

    evaluated = [r for r in results if not r.failed]
    metrics = None
    asr_metrics = None
    if evaluated:
        metrics = evaluate(
            [r.ref_translation for r in evaluated],
            [r.hyp_translation for r in evaluated],
            metrics=config.metrics,
        )
        if with_asr:
            asr_metrics = evaluate(
                [r.ref_transcript for r in evaluated],
                [r.hyp_transcript for r in evaluated],
                metrics=("wer",),
            )
    snapshot = asdict(config)
    snapshot["metrics"] = list(config.metrics)
    snapshot["adapter_capabilities"] = caps.to_dict()
    return RunReport(
        label=config.system_label,
        mode=config.mode,
        results=tuple(results),
        metrics=metrics,
        asr_metrics=asr_metrics,
        config=snapshot,
        evaluated=len(evaluated),
        failed=len(results) - len(evaluated),
        duration_seconds=time.perf_counter() - started,
    )


def run_cascaded(corpus: Corpus, config: PipelineConfig, adapter=None) -> RunReport:
    """Transcribe each utterance's audio, then translate the transcript.

    Translation metrics aggregate against reference translations; ASR
    word error rate aggregates against the reference transcripts.
    """
    _require_mode(config, "cascaded")
    _require_non_empty(corpus)
    _require_audio(corpus)
    _require_references(corpus)
    owned = adapter is None
    adapter = adapter or open_adapter(config.adapter)
    try:
        def worker(utt: Utterance) -> UtteranceResult:
            hyp_transcript = adapter.transcribe(
                utt.audio, corpus.src_lang, beam_size=config.beam_size
            )
            hyp_translation, _ = adapter.translate(
                hyp_transcript,
                corpus.src_lang,
                corpus.tgt_lang,
                beam_size=config.beam_size,
            )
            return UtteranceResult(
                id=utt.id,
                ref_translation=utt.translation,
                hyp_translation=hyp_translation,
                ref_transcript=utt.transcript,
                hyp_transcript=hyp_transcript,
            )

        return _run(corpus, config, adapter, worker, with_asr=True)
    finally:
        if owned:
            adapter.close()


def run_end_to_end(corpus: Corpus, config: PipelineConfig, adapter=None) -> RunReport:
    """Translate audio directly to target-language text, one call per utterance."""
    _require_mode(config, "end_to_end")
    _require_non_empty(corpus)
    _require_audio(corpus)
    _require_references(corpus)
    owned = adapter is None
    adapter = adapter or open_adapter(config.adapter)
    try:
        caps = adapter.capabilities()
        if not caps.supports_task("translate_audio"):
            raise CapabilityError(
                f"adapter {caps.backend!r} does not support translate_audio"
            )

        def worker(utt: Utterance) -> UtteranceResult:
            hyp_translation = adapter.translate_audio(
                utt.audio, corpus.src_lang, corpus.tgt_lang, beam_size=config.beam_size
            )
            return UtteranceResult(
                id=utt.id,
                ref_translation=utt.translation,
                hyp_translation=hyp_translation,
            )

        return _run(corpus, config, adapter, worker, with_asr=False)
    finally:
        if owned:
            adapter.close()


def run_mt_only(corpus: Corpus, config: PipelineConfig, adapter=None) -> RunReport:
    """Translate the stored transcripts; audio is not required.

    With tag_policy "strip", a leading back-translation tag is removed
    before the text goes to the adapter; "keep" sends it verbatim.
    """
    _require_mode(config, "mt_only")
    _require_non_empty(corpus)
    _require_references(corpus)
    owned = adapter is None
    adapter = adapter or open_adapter(config.adapter)
    try:
        def worker(utt: Utterance) -> UtteranceResult:
            text = utt.transcript
            if config.tag_policy == "strip":
                text = strip_bt_tag(text)
            hyp_translation, _ = adapter.translate(
                text, corpus.src_lang, corpus.tgt_lang, beam_size=config.beam_size
            )
            return UtteranceResult(
                id=utt.id,
                ref_translation=utt.translation,
                hyp_translation=hyp_translation,
            )

        return _run(corpus, config, adapter, worker, with_asr=False)
    finally:
        if owned:
            adapter.close()


def recompute_aggregates(
    report: RunReport,
) -> tuple[MetricReport | None, MetricReport | None]:
    """Recompute aggregate metrics from the stored per-utterance outputs.

    Pure functions over the same stored texts reproduce the report's
    aggregates bit-exactly; this is the report's self-verification hook.
    """
    evaluated = [r for r in report.results if not r.failed]
    metrics = None
    asr_metrics = None
    if evaluated and report.metrics is not None:
        requested = [
            name
            for name, value in (
                ("bleu", report.metrics.bleu),
                ("chrf", report.metrics.chrf_pp),
                ("wer", report.metrics.wer),
            )
            if value is not None
        ]
        metrics = evaluate(
            [r.ref_translation for r in evaluated],
            [r.hyp_translation for r in evaluated],
            metrics=requested,
            comet=report.metrics.comet,
        )
    if evaluated and report.asr_metrics is not None:
        asr_metrics = evaluate(
            [r.ref_transcript for r in evaluated],
            [r.hyp_transcript for r in evaluated],
            metrics=("wer",),
        )
    return metrics, asr_metrics


def _report_columns(reports: Sequence[RunReport]) -> list[str]:
    columns = []
    if any(r.metrics and r.metrics.bleu is not None for r in reports):
        columns.append("BLEU")
    if any(r.metrics and r.metrics.chrf_pp is not None for r in reports):
        columns.append("chrF++")
    if any(r.metrics and r.metrics.wer is not None for r in reports):
        columns.append("WER")
    if any(r.metrics and r.metrics.comet is not None for r in reports):
        columns.append("COMET")
    if any(r.asr_metrics and r.asr_metrics.wer is not None for r in reports):
        columns.append("ASR WER")
    return columns


def _column_value(report: RunReport, column: str) -> float | None:
    metrics = report.metrics
    if column == "BLEU":
        return metrics.bleu if metrics else None
    if column == "chrF++":
        return metrics.chrf_pp if metrics else None
    if column == "WER":
        return metrics.wer if metrics else None
    if column == "COMET":
        return metrics.comet if metrics else None
    if column == "ASR WER":
        return report.asr_metrics.wer if report.asr_metrics else None
    raise ValueError(column)


def compare(reports: Sequence[RunReport], format: str = "markdown") -> str:
    """Render a comparison table, one row per report.

    Markdown bolds the best value per column and underlines the second
    best; WER columns rank lower-is-better. CSV renders plain 2-decimal
    values; JSON carries full-precision aggregates.
    """
    if not reports:
        raise ValueError("no reports to compare")
    if format not in COMPARE_FORMATS:
        raise ValueError(f"unknown comparison format: {format!r}")
    columns = _report_columns(reports)

    if format == "json":
        rows = []
        for report in reports:
            row: dict = {"label": report.label, "mode": report.mode}
            if report.metrics:
                row.update(report.metrics.to_dict())
            if report.asr_metrics and report.asr_metrics.wer is not None:
                row["asr_wer"] = report.asr_metrics.wer
            rows.append(row)
        return json.dumps(rows, ensure_ascii=False, indent=2)

    # rank values per column for highlighting
    best: dict[str, float] = {}
    second: dict[str, float] = {}
    for column in columns:
        values = sorted(
            {
                v
                for r in reports
                if (v := _column_value(r, column)) is not None
            },
            reverse=_HIGHER_IS_BETTER[column],
        )
        if values:
            best[column] = values[0]
        if len(values) > 1:
            second[column] = values[1]

    def render(report: RunReport, column: str, highlight: bool) -> str:
        value = _column_value(report, column)
        if value is None:
            return ""
        cell = f"{value:.2f}"
        if highlight and len(reports) > 1:
            if value == best.get(column):
                cell = f"**{cell}**"
            elif value == second.get(column):
                cell = f"<u>{cell}</u>"
        return cell

    if format == "csv":
        lines = [",".join(["System"] + columns)]
        for report in reports:
            lines.append(
                ",".join([report.label] + [render(report, c, False) for c in columns])
            )
        return "\n".join(lines)

    header = "| System | " + " | ".join(columns) + " |"
    divider = "|" + "---|" * (len(columns) + 1)
    lines = [header, divider]
    for report in reports:
        cells = [render(report, c, True) for c in columns]
        lines.append("| " + " | ".join([report.label] + cells) + " |")
    return "\n".join(lines)
