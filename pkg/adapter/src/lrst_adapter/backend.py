"""Backends behind the wire protocol, plus score normalization.

A backend exposes capabilities and the three inference tasks. Whatever
score notion a backend natively reports, the serving layer normalizes
it to a mean per-token natural-log probability before it crosses the
wire: ``score_mode = "mean"`` passes through, ``"cumulative"`` divides
by the output's token count. Model-backed implementations (Whisper-style
ASR, NLLB-style MT) plug in behind the same interface; the shipped
backend is the table-driven mock, which needs no model runtime and makes
every response deterministic.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

FIXTURE_ENV_VAR = "LRST_ADAPTER_FIXTURE"
SCORE_MODES = ("mean", "cumulative")

_DEFAULT_SCORE = -0.1


class BackendError(Exception):
    """The backend cannot answer this request (bad input, missing entry)."""


class UnsupportedError(BackendError):
    """The backend lacks the requested task or language pair."""


def normalize_score(raw_score: float, score_mode: str, output_text: str) -> float:
    """Normalize a backend score to a mean per-token log-probability.

    Cumulative scores are divided by the output token count (whitespace
    tokens, the only token notion a table backend has); an empty output
    counts as one token.
    """
    if score_mode == "mean":
        return float(raw_score)
    if score_mode == "cumulative":
        return float(raw_score) / max(1, len(output_text.split()))
    raise ValueError(f"unknown score_mode: {score_mode!r}")


class MockBackend:
    """Deterministic table-driven backend loaded from a JSON fixture.

    The fixture is the same plain-JSON shape the orchestrator-side mock
    uses: ``transcribe`` maps audio references to transcripts;
    ``translate`` and ``translate_audio`` nest tables under "src-tgt"
    pairs; ``failures`` plants per-input errors; ``identity_fallback``
    echoes unknown translate inputs. Entry scores (``avg_log_prob`` or
    ``score``) are interpreted per the fixture's ``score_mode``.
    """

    def __init__(self, table: dict, score_mode: str | None = None):
        self.name = table.get("backend", "mock")
        self.score_mode = score_mode or table.get("score_mode", "mean")
        if self.score_mode not in SCORE_MODES:
            raise ValueError(f"unknown score_mode: {self.score_mode!r}")
        self._pairs = tuple(table.get("language_pairs", ()))
        self._metadata = dict(table.get("metadata", {}))
        self._identity_fallback = bool(table.get("identity_fallback", False))
        self._default_score = float(table.get("default_log_prob", _DEFAULT_SCORE))
        self._transcribe = dict(table.get("transcribe", {}))
        self._translate = {k: dict(v) for k, v in table.get("translate", {}).items()}
        self._translate_audio = {
            k: dict(v) for k, v in table.get("translate_audio", {}).items()
        }
        self._failures = table.get("failures", {})
        tasks = []
        if self._transcribe:
            tasks.append("transcribe")
        if self._translate or self._identity_fallback:
            tasks.append("translate")
        if self._translate_audio:
            tasks.append("translate_audio")
        self.tasks = tuple(tasks)

    @classmethod
    def from_file(cls, path: str | Path | None = None, score_mode: str | None = None):
        if path is None:
            path = os.environ.get(FIXTURE_ENV_VAR)
            if not path:
                raise ValueError(
                    f"no fixture path given and {FIXTURE_ENV_VAR} is unset"
                )
        table = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(table, score_mode=score_mode)

    def capabilities(self) -> dict:
        return {
            "backend": self.name,
            "tasks": list(self.tasks),
            "language_pairs": list(self._pairs),
            "metadata": {**self._metadata, "score_mode": self.score_mode},
        }

    def _check_task(self, task: str) -> None:
        if task not in self.tasks:
            raise UnsupportedError(f"backend does not support {task}")

    def _check_pair(self, src_lang, tgt_lang) -> str:
        pair = f"{src_lang}-{tgt_lang}"
        if pair not in self._pairs:
            raise UnsupportedError(f"unsupported language pair: {pair}")
        return pair

    def _fail_if_planted(self, task: str, *keys: str) -> None:
        node = self._failures.get(task, {})
        for key in keys[:-1]:
            node = node.get(key, {})
        message = node.get(keys[-1])
        if message is not None:
            raise BackendError(message)

    def transcribe(self, audio: str, lang, beam_size: int) -> str:
        self._check_task("transcribe")
        self._fail_if_planted("transcribe", audio)
        if audio not in self._transcribe:
            raise BackendError(f"no such file: {audio}")
        return self._transcribe[audio]

    def translate(self, text: str, src_lang, tgt_lang, beam_size: int) -> tuple[str, float]:
        """Returns (output text, raw score in this backend's score_mode)."""
        self._check_task("translate")
        pair = self._check_pair(src_lang, tgt_lang)
        self._fail_if_planted("translate", pair, text)
        entry = self._translate.get(pair, {}).get(text)
        if entry is None:
            if not self._identity_fallback:
                raise BackendError(f"no translation table entry for {text!r} ({pair})")
            return text, self._default_score
        if isinstance(entry, str):
            return entry, self._default_score
        score = entry.get("avg_log_prob", entry.get("score", self._default_score))
        return entry["text"], score

    def translate_audio(self, audio: str, src_lang, tgt_lang, beam_size: int) -> str:
        self._check_task("translate_audio")
        pair = self._check_pair(src_lang, tgt_lang)
        self._fail_if_planted("translate_audio", pair, audio)
        entry = self._translate_audio.get(pair, {}).get(audio)
        if entry is None:
            raise BackendError(f"no such file: {audio}")
        return entry
