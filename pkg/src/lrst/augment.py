"""Back-translated bitext: scoring, filtering, tagging, and merging.

Synthetic source sentences are produced by translating monolingual
target-language text in the reverse direction. Each pair carries the
engine's mean per-token log-probability (natural log); its exponential
lands in (0, 1] and serves as the quality score used for threshold
filtering. Segments scoring exactly at the threshold are kept: only
strictly lower scores are removed.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, Utterance
from .errors import (
    AdapterProtocolError,
    AdapterResponseError,
    CapabilityError,
    CorpusFormatError,
    CorpusIOError,
    LanguageMismatchError,
)

__all__ = [
    "BT_TAG",
    "ScoredSegment",
    "RejectedSegment",
    "AugmentConfig",
    "quality_from_log_prob",
    "filter_by_quality",
    "apply_bt_tag",
    "strip_bt_tag",
    "synthesize_bt_corpus",
    "build_training_set",
    "read_scored_segments",
    "write_scored_segments",
]

BT_TAG = "<bt>"
DEFAULT_QUALITY_THRESHOLD = 0.77
TAG_POLICIES = ("prepend", "none")

SEGMENT_KEYS = ("source_text", "target_text", "avg_log_prob", "quality")

# quality must equal exp(avg_log_prob) to this relative error
_QUALITY_RTOL = 1e-12


def quality_from_log_prob(avg_log_prob: float) -> float:
    """Quality score in (0, 1]: the exponential of a mean token log-prob."""
    if not math.isfinite(avg_log_prob):
        raise ValueError(f"avg_log_prob must be finite, got {avg_log_prob!r}")
    if avg_log_prob > 0.0:
        raise ValueError(f"avg_log_prob must be <= 0, got {avg_log_prob!r}")
    return math.exp(avg_log_prob)


@dataclass(frozen=True)
class ScoredSegment:
    """A back-translated pair: synthetic source, authentic target, score."""

    source_text: str
    target_text: str
    avg_log_prob: float
    quality: float

    def __post_init__(self):
        expected = quality_from_log_prob(self.avg_log_prob)
        if not 0.0 < self.quality <= 1.0:
            raise ValueError(f"quality {self.quality} outside (0, 1]")
        if abs(self.quality - expected) > _QUALITY_RTOL * expected:
            raise ValueError(
                f"quality {self.quality!r} does not equal "
                f"exp(avg_log_prob) = {expected!r}"
            )

    @classmethod
    def from_log_prob(
        cls, source_text: str, target_text: str, avg_log_prob: float
    ) -> "ScoredSegment":
        return cls(
            source_text=source_text,
            target_text=target_text,
            avg_log_prob=avg_log_prob,
            quality=quality_from_log_prob(avg_log_prob),
        )


@dataclass(frozen=True)
class RejectedSegment:
    """An input the adapter failed on, kept for the rejects sidecar."""

    id: str
    text: str
    error: str


@dataclass(frozen=True)
class AugmentConfig:
    """Filtering threshold and synthetic-data tag policy."""

    threshold: float = DEFAULT_QUALITY_THRESHOLD
    tag: str = BT_TAG
    tag_policy: str = "none"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if self.tag_policy not in TAG_POLICIES:
            raise ValueError(f"bad tag_policy {self.tag_policy!r}")
        if self.tag_policy == "prepend" and not self.tag:
            raise ValueError("tag_policy 'prepend' requires a non-empty tag")


def filter_by_quality(
    segments: Sequence[ScoredSegment], threshold: float
) -> tuple[list[ScoredSegment], int]:
    """Keep segments with quality >= threshold (boundary survives), in order."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    kept = [s for s in segments if s.quality >= threshold]
    return kept, len(segments) - len(kept)


def apply_bt_tag(text: str, tag: str = BT_TAG) -> str:
    """Prepend "tag + single space"; already-tagged input passes through."""
    if not tag:
        raise ValueError("empty tag")
    if any(c.isspace() for c in tag):
        raise ValueError(f"tag must not contain whitespace: {tag!r}")
    prefix = tag + " "
    if text.startswith(prefix):
        return text
    return prefix + text


def strip_bt_tag(text: str, tag: str = BT_TAG) -> str:
    """Remove one leading "tag + space" occurrence; identity otherwise."""
    prefix = tag + " "
    if text.startswith(prefix):
        return text[len(prefix):]
    return text


def synthesize_bt_corpus(
    mono_targets: Corpus,
    adapter,
    direction: tuple[str, str],
    *,
    beam_size: int = 5,
    concurrency_limit: int = 4,
) -> tuple[list[ScoredSegment], list[RejectedSegment]]:
    """Back-translate target-language text into scored synthetic bitext.

    One scored segment per input utterance, in input order regardless of
    request concurrency: target_text keeps the original text, source_text
    is the adapter's translation. Per-segment adapter failures land in
    the rejects list instead of aborting; an unreachable adapter aborts
    the whole operation.
    """
    src, tgt = direction
    caps = adapter.capabilities()
    if not caps.supports_task("translate"):
        raise CapabilityError(f"adapter {caps.backend!r} does not support translate")
    if not caps.supports_pair(src, tgt):
        raise CapabilityError(
            f"adapter {caps.backend!r} does not support language pair {src}-{tgt}"
        )

    def translate_one(utt: Utterance) -> ScoredSegment:
        text, avg_log_prob = adapter.translate(
            utt.transcript, src, tgt, beam_size=beam_size, return_score=True
        )
        return ScoredSegment.from_log_prob(
            source_text=text,
            target_text=utt.transcript,
            avg_log_prob=avg_log_prob,
        )

    segments: list[ScoredSegment] = []
    rejects: list[RejectedSegment] = []
    with ThreadPoolExecutor(max_workers=max(1, concurrency_limit)) as pool:
        futures = [pool.submit(translate_one, u) for u in mono_targets.utterances]
        for utt, future in zip(mono_targets.utterances, futures):
            try:
                segments.append(future.result())
            except (AdapterResponseError, AdapterProtocolError, CapabilityError) as exc:
                rejects.append(RejectedSegment(utt.id, utt.transcript, str(exc)))
    return segments, rejects


def build_training_set(
    authentic: Corpus,
    synthetic: Sequence[ScoredSegment],
    config: AugmentConfig = AugmentConfig(),
    *,
    src_lang: str | None = None,
    tgt_lang: str | None = None,
) -> Corpus:
    """Append filtered, tagged synthetic utterances to the authentic corpus.

    The config threshold is applied here (a no-op for pre-filtered
    input); synthetic utterances carry origin "synthetic", their quality
    score, and ids of the form "bt/<n>".
    """
    if src_lang is not None and src_lang != authentic.src_lang:
        raise LanguageMismatchError(
            f"synthetic source language {src_lang!r} does not match "
            f"corpus source {authentic.src_lang!r}"
        )
    if tgt_lang is not None and tgt_lang != authentic.tgt_lang:
        raise LanguageMismatchError(
            f"synthetic target language {tgt_lang!r} does not match "
            f"corpus target {authentic.tgt_lang!r}"
        )
    kept, _ = filter_by_quality(synthetic, config.threshold)
    utterances = list(authentic.utterances)
    for i, seg in enumerate(kept):
        source = seg.source_text
        if config.tag_policy == "prepend":
            source = apply_bt_tag(source, config.tag)
        utterances.append(
            Utterance(
                id=f"bt/{i:06d}",
                transcript=source,
                translation=seg.target_text,
                src_lang=authentic.src_lang,
                tgt_lang=authentic.tgt_lang,
                origin="synthetic",
                quality=seg.quality,
            )
        )
    return Corpus(
        name=f"{authentic.name}+bt",
        split=authentic.split,
        src_lang=authentic.src_lang,
        tgt_lang=authentic.tgt_lang,
        utterances=tuple(utterances),
    )


def read_scored_segments(path: str | Path) -> list[ScoredSegment]:
    """Read scored segments from JSONL, validating the score invariants."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc
    segments: list[ScoredSegment] = []
    for lineno, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"bad JSON: {exc.msg}", str(path), lineno) from None
        if not isinstance(obj, dict) or set(obj) != set(SEGMENT_KEYS):
            raise CorpusFormatError(
                f"expected keys {list(SEGMENT_KEYS)}", str(path), lineno
            )
        try:
            segments.append(ScoredSegment(**obj))
        except (TypeError, ValueError) as exc:
            raise CorpusFormatError(str(exc), str(path), lineno) from None
    return segments


def write_scored_segments(segments: Sequence[ScoredSegment], path: str | Path) -> None:
    lines = [
        json.dumps(
            {
                "source_text": s.source_text,
                "target_text": s.target_text,
                "avg_log_prob": s.avg_log_prob,
                "quality": s.quality,
            },
            ensure_ascii=False,
        )
        for s in segments
    ]
    try:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot write {path}: {exc}") from exc
