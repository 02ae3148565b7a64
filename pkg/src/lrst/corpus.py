"""Speech-translation corpus containers, ingestion, and dedup.

A corpus is an ordered, immutable collection of utterances sharing one
language pair. Files come in two shapes: a fixed-header TSV and JSONL
with the same keys; an empty TSV cell or an absent JSONL key means an
absent optional field. All operations are pure functions over immutable
values, so they are safe under concurrent callers.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Sequence

from .errors import (
    CorpusFormatError,
    CorpusIOError,
    DuplicateIdError,
    LanguageMismatchError,
)

__all__ = [
    "Utterance",
    "Corpus",
    "CorpusStats",
    "load_corpus",
    "write_corpus",
    "normalize_text",
    "dedup_against",
    "merge",
    "stats",
]

ORIGINS = ("authentic", "synthetic")
SPLITS = ("train", "dev", "test")
FORMATS = ("tsv", "jsonl")
TSV_COLUMNS = ("id", "audio", "transcript", "translation", "origin", "quality")
NORMALIZATION_SCHEMES = ("display", "dedup_key")


@dataclass(frozen=True)
class Utterance:
    """One speech-translation record.

    ``audio`` is an opaque reference (path or URI) handed to the
    inference adapter; it is never decoded here. ``quality`` is the
    back-translation quality score in (0, 1] and is mandatory for
    synthetic utterances.
    """

    id: str
    transcript: str
    src_lang: str
    tgt_lang: str
    audio: str | None = None
    translation: str | None = None
    origin: str = "authentic"
    quality: float | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("utterance id must be non-empty")
        if not self.transcript.strip():
            raise ValueError(f"utterance {self.id!r}: transcript is empty")
        if self.origin not in ORIGINS:
            raise ValueError(f"utterance {self.id!r}: bad origin {self.origin!r}")
        if self.quality is not None and not 0.0 < self.quality <= 1.0:
            raise ValueError(
                f"utterance {self.id!r}: quality {self.quality} outside (0, 1]"
            )
        if self.origin == "synthetic" and self.quality is None:
            raise ValueError(
                f"utterance {self.id!r}: synthetic origin requires a quality score"
            )


@dataclass(frozen=True)
class Corpus:
    """A named, split-labeled collection of utterances with unique ids."""

    name: str
    split: str
    src_lang: str
    tgt_lang: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"corpus {self.name!r}: bad split {self.split!r}")
        seen: set[str] = set()
        for utt in self.utterances:
            if (utt.src_lang, utt.tgt_lang) != (self.src_lang, self.tgt_lang):
                raise LanguageMismatchError(
                    f"utterance {utt.id!r} pair {utt.src_lang}-{utt.tgt_lang} "
                    f"does not match corpus pair {self.src_lang}-{self.tgt_lang}"
                )
            if utt.id in seen:
                raise DuplicateIdError(utt.id)
            seen.add(utt.id)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.utterances)

    @property
    def language_pair(self) -> str:
        return f"{self.src_lang}-{self.tgt_lang}"


@dataclass(frozen=True)
class CorpusStats:
    name: str
    split: str
    language_pair: str
    count: int
    with_audio: int
    with_translation: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "split": self.split,
            "language_pair": self.language_pair,
            "count": self.count,
            "with_audio": self.with_audio,
            "with_translation": self.with_translation,
        }


def normalize_text(text: str, scheme: str = "display") -> str:
    """Normalize text for display or for use as a dedup key.

    ``display``: NFC composition, whitespace runs collapsed to single
    spaces, trimmed. ``dedup_key``: display form, lowercased, with every
    character that is neither alphanumeric nor a space removed, then
    collapsed again. Both schemes are idempotent.
    """
    if scheme not in NORMALIZATION_SCHEMES:
        raise ValueError(f"unknown normalization scheme: {scheme!r}")
    display = " ".join(unicodedata.normalize("NFC", text).split())
    if scheme == "display":
        return display
    lowered = display.lower()
    kept = "".join(c for c in lowered if c.isalnum() or c == " ")
    return " ".join(kept.split())


def _quality_from_field(raw: str, path: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise CorpusFormatError(f"bad quality value {raw!r}", path, line) from None


def _build_utterance(record: dict, src_lang: str, tgt_lang: str, path: str, line: int) -> Utterance:
    for key in ("id", "transcript", "audio", "translation", "origin"):
        value = record.get(key)
        if value is not None and not isinstance(value, str):
            raise CorpusFormatError(f"field {key!r} is not a string", path, line)
    quality = record.get("quality")
    if quality is not None and not isinstance(quality, (int, float)):
        raise CorpusFormatError("field 'quality' is not a number", path, line)
    try:
        return Utterance(src_lang=src_lang, tgt_lang=tgt_lang, **record)
    except ValueError as exc:
        raise CorpusFormatError(str(exc), path, line) from None


def load_corpus(
    path: str | Path,
    format: str = "jsonl",
    *,
    name: str | None = None,
    split: str = "train",
    src_lang: str = "bem",
    tgt_lang: str = "eng",
) -> Corpus:
    """Load a corpus file, preserving record order.

    The file formats carry no corpus-level metadata, so name (defaults
    to the file stem), split, and language pair are supplied by the
    caller.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown corpus format: {format!r}")
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc

    spath = str(path)
    if not raw.strip():
        raise CorpusFormatError("empty corpus", spath)
    utterances: list[Utterance] = []
    lines = raw.split("\n")
    if format == "tsv":
        if not lines or lines[0].split("\t") != list(TSV_COLUMNS):
            raise CorpusFormatError(
                f"missing or bad TSV header (expected {chr(9).join(TSV_COLUMNS)!r})",
                spath,
                1,
            )
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(TSV_COLUMNS):
                raise CorpusFormatError(
                    f"expected {len(TSV_COLUMNS)} fields, got {len(cells)}",
                    spath,
                    lineno,
                )
            uid, audio, transcript, translation, origin, quality = cells
            record = {
                "id": uid,
                "transcript": transcript,
                "audio": audio or None,
                "translation": translation or None,
                "origin": origin or "authentic",
                "quality": _quality_from_field(quality, spath, lineno) if quality else None,
            }
            utterances.append(_build_utterance(record, src_lang, tgt_lang, spath, lineno))
    else:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"bad JSON: {exc.msg}", spath, lineno) from None
            if not isinstance(obj, dict):
                raise CorpusFormatError("record is not a JSON object", spath, lineno)
            unknown = set(obj) - set(TSV_COLUMNS)
            if unknown:
                raise CorpusFormatError(
                    f"unknown keys: {sorted(unknown)}", spath, lineno
                )
            record = {
                "id": obj.get("id", ""),
                "transcript": obj.get("transcript", ""),
                "audio": obj.get("audio") or None,
                "translation": obj.get("translation") or None,
                "origin": obj.get("origin") or "authentic",
                "quality": obj.get("quality"),
            }
            utterances.append(_build_utterance(record, src_lang, tgt_lang, spath, lineno))

    if not utterances:
        raise CorpusFormatError("empty corpus", spath)
    return Corpus(
        name=name if name is not None else path.stem,
        split=split,
        src_lang=src_lang,
        tgt_lang=tgt_lang,
        utterances=tuple(utterances),
    )


def write_corpus(corpus: Corpus, path: str | Path, format: str = "jsonl") -> None:
    """Write a corpus so that load_corpus reads it back field-for-field."""
    if format not in FORMATS:
        raise ValueError(f"unknown corpus format: {format!r}")
    lines: list[str] = []
    if format == "tsv":
        lines.append("\t".join(TSV_COLUMNS))
        for utt in corpus.utterances:
            cells = (
                utt.id,
                utt.audio or "",
                utt.transcript,
                utt.translation or "",
                utt.origin,
                repr(utt.quality) if utt.quality is not None else "",
            )
            for cell in cells:
                if "\t" in cell or "\n" in cell:
                    raise ValueError(
                        f"utterance {utt.id!r}: field contains TAB or newline, "
                        "not representable in TSV"
                    )
            lines.append("\t".join(cells))
    else:
        for utt in corpus.utterances:
            record = {"id": utt.id}
            if utt.audio is not None:
                record["audio"] = utt.audio
            record["transcript"] = utt.transcript
            if utt.translation is not None:
                record["translation"] = utt.translation
            record["origin"] = utt.origin
            if utt.quality is not None:
                record["quality"] = utt.quality
            lines.append(json.dumps(record, ensure_ascii=False))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot write {path}: {exc}") from exc


def dedup_against(
    train: Corpus,
    held_out: Sequence[Corpus],
    *,
    exact: bool = False,
) -> tuple[Corpus, int]:
    """Drop training utterances whose transcript occurs in any held-out set.

    Overlap is equality of dedup_key-normalized transcripts, which
    catches case and punctuation variants; pass ``exact=True`` for
    raw-string matching. Held-out corpora are never modified.
    """
    for held in held_out:
        if held.src_lang != train.src_lang:
            raise LanguageMismatchError(
                f"held-out corpus {held.name!r} source language {held.src_lang!r} "
                f"does not match training source {train.src_lang!r}"
            )
    if exact:
        key = lambda t: t
    else:
        key = lambda t: normalize_text(t, "dedup_key")
    held_keys = {key(u.transcript) for c in held_out for u in c.utterances}
    kept = tuple(u for u in train.utterances if key(u.transcript) not in held_keys)
    removed = len(train.utterances) - len(kept)
    return replace(train, utterances=kept), removed


def merge(corpora: Sequence[Corpus], name: str) -> Corpus:
    """Concatenate corpora sharing one language pair.

    Ids colliding across inputs get re-namespaced as "<corpusname>/<id>"
    (deterministic and lossless); unique ids pass through untouched.
    """
    if not corpora:
        raise ValueError("no corpora")
    first = corpora[0]
    for c in corpora[1:]:
        if (c.src_lang, c.tgt_lang) != (first.src_lang, first.tgt_lang):
            raise LanguageMismatchError(
                f"corpus {c.name!r} pair {c.language_pair} does not match "
                f"{first.name!r} pair {first.language_pair}"
            )
    id_counts = Counter(u.id for c in corpora for u in c.utterances)
    merged: list[Utterance] = []
    for c in corpora:
        for u in c.utterances:
            if id_counts[u.id] > 1:
                merged.append(replace(u, id=f"{c.name}/{u.id}"))
            else:
                merged.append(u)
    return Corpus(
        name=name,
        split=first.split,
        src_lang=first.src_lang,
        tgt_lang=first.tgt_lang,
        utterances=tuple(merged),
    )


def stats(corpus: Corpus) -> CorpusStats:
    """Exact counts over a corpus (sizes mirror dataset statistics tables)."""
    return CorpusStats(
        name=corpus.name,
        split=corpus.split,
        language_pair=corpus.language_pair,
        count=len(corpus.utterances),
        with_audio=sum(1 for u in corpus.utterances if u.audio is not None),
        with_translation=sum(1 for u in corpus.utterances if u.translation is not None),
    )
