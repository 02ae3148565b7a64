"""Clients for the model-agnostic inference wire protocol.

Three interchangeable adapter handles:

- ``MockAdapter``: in-process, table-driven from a plain JSON fixture;
  deterministic, needs no model runtime. Used by the test suite and the
  demos.
- ``SubprocessAdapter``: spawns a serving process and speaks
  newline-delimited JSON over its standard streams.
- ``HttpAdapter``: POSTs the same JSON bodies to ``/v1/infer``.

Requests carry a caller-chosen id which the server echoes back;
responses may arrive out of order, id pairing is authoritative. Every
adapter normalizes scores to the mean per-token natural-log probability;
a response with a positive score is rejected client-side with a
protocol error.

Endpoint specs accepted by :func:`open_adapter`:

- ``mock:<fixture.json>`` (or bare ``mock`` with LRST_ADAPTER_FIXTURE set)
- ``subprocess:<command line>``
- ``http://...`` / ``https://...``
"""

from __future__ import annotations

import itertools
import json
import os
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import (
    AdapterProtocolError,
    AdapterResponseError,
    AdapterUnreachableError,
    CapabilityError,
    ConfigError,
)

__all__ = [
    "AdapterCapabilities",
    "MockAdapter",
    "SubprocessAdapter",
    "HttpAdapter",
    "open_adapter",
]

TASKS = ("transcribe", "translate", "translate_audio")
FIXTURE_ENV_VAR = "LRST_ADAPTER_FIXTURE"
DEFAULT_BEAM_SIZE = 5

# fallback mean log-prob for mock translate entries without an explicit score
_MOCK_DEFAULT_LOG_PROB = -0.1


@dataclass(frozen=True)
class AdapterCapabilities:
    """What a backend can do, plus provenance metadata for run reports."""

    backend: str
    tasks: tuple[str, ...]
    language_pairs: tuple[str, ...]
    metadata: Mapping = field(default_factory=dict)

    def supports_task(self, task: str) -> bool:
        return task in self.tasks

    def supports_pair(self, src_lang: str, tgt_lang: str) -> bool:
        return f"{src_lang}-{tgt_lang}" in self.language_pairs

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "tasks": list(self.tasks),
            "language_pairs": list(self.language_pairs),
            "metadata": dict(self.metadata),
        }


def _check_score(avg_log_prob) -> float:
    if not isinstance(avg_log_prob, (int, float)):
        raise AdapterProtocolError(
            f"avg_log_prob is not a number: {avg_log_prob!r}"
        )
    if avg_log_prob > 0:
        raise AdapterProtocolError(
            f"adapter emitted a positive avg_log_prob: {avg_log_prob!r}"
        )
    return float(avg_log_prob)


class MockAdapter:
    """Deterministic table-driven adapter loaded from a JSON fixture.

    Fixture schema (all tables optional; present tables define the
    advertised task set)::

        {
          "backend": "mock",
          "language_pairs": ["bem-eng", "eng-bem"],
          "metadata": {...},                  # echoed via capabilities
          "identity_fallback": false,         # translate unknown text as-is
          "default_log_prob": -0.1,
          "transcribe": {"<audio>": "transcript"},
          "translate": {"bem-eng": {"input":
              "output" | {"text": "...", "avg_log_prob": -0.05}}},
          "translate_audio": {"bem-eng": {"<audio>": "translation"}},
          "failures": {"transcribe": {"<audio>": "message"},
                       "translate": {"bem-eng": {"input": "message"}},
                       "translate_audio": {"bem-eng": {"<audio>": "message"}}}
        }

    Tables are read-only after construction, so one instance is safe
    under interleaved concurrent requests.
    """

    def __init__(self, table: dict):
        self._backend = table.get("backend", "mock")
        self._pairs = tuple(table.get("language_pairs", ()))
        self._metadata = dict(table.get("metadata", {}))
        self._identity_fallback = bool(table.get("identity_fallback", False))
        self._default_log_prob = float(
            table.get("default_log_prob", _MOCK_DEFAULT_LOG_PROB)
        )
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
        self._tasks = tuple(tasks)

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "MockAdapter":
        if path is None:
            path = os.environ.get(FIXTURE_ENV_VAR)
            if not path:
                raise ConfigError(
                    f"no mock fixture path given and {FIXTURE_ENV_VAR} is unset"
                )
        try:
            table = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read mock fixture {path}: {exc}") from exc
        return cls(table)

    def capabilities(self) -> AdapterCapabilities:
        return AdapterCapabilities(
            backend=self._backend,
            tasks=self._tasks,
            language_pairs=self._pairs,
            metadata=self._metadata,
        )

    def _fail_if_planted(self, task: str, *keys: str) -> None:
        node = self._failures.get(task, {})
        for key in keys[:-1]:
            node = node.get(key, {})
        message = node.get(keys[-1])
        if message is not None:
            raise AdapterResponseError(message)

    def _check_pair(self, src_lang: str, tgt_lang: str) -> str:
        pair = f"{src_lang}-{tgt_lang}"
        if pair not in self._pairs:
            raise CapabilityError(f"unsupported language pair: {pair}")
        return pair

    def transcribe(self, audio: str, lang: str, beam_size: int = DEFAULT_BEAM_SIZE) -> str:
        if "transcribe" not in self._tasks:
            raise CapabilityError("backend does not support transcribe")
        self._fail_if_planted("transcribe", audio)
        if audio not in self._transcribe:
            raise AdapterResponseError(f"no such file: {audio}")
        return self._transcribe[audio]

    def translate(
        self,
        text: str,
        src_lang: str,
        tgt_lang: str,
        beam_size: int = DEFAULT_BEAM_SIZE,
        return_score: bool = False,
    ) -> tuple[str, float | None]:
        if "translate" not in self._tasks:
            raise CapabilityError("backend does not support translate")
        pair = self._check_pair(src_lang, tgt_lang)
        self._fail_if_planted("translate", pair, text)
        entry = self._translate.get(pair, {}).get(text)
        if entry is None:
            if not self._identity_fallback:
                raise AdapterResponseError(
                    f"no translation table entry for {text!r} ({pair})"
                )
            out, score = text, self._default_log_prob
        elif isinstance(entry, str):
            out, score = entry, self._default_log_prob
        else:
            out = entry["text"]
            score = entry.get("avg_log_prob", self._default_log_prob)
        if not return_score:
            return out, None
        return out, _check_score(score)

    def translate_audio(
        self,
        audio: str,
        src_lang: str,
        tgt_lang: str,
        beam_size: int = DEFAULT_BEAM_SIZE,
    ) -> str:
        if "translate_audio" not in self._tasks:
            raise CapabilityError("backend does not support translate_audio")
        pair = self._check_pair(src_lang, tgt_lang)
        self._fail_if_planted("translate_audio", pair, audio)
        entry = self._translate_audio.get(pair, {}).get(audio)
        if entry is None:
            raise AdapterResponseError(f"no such file: {audio}")
        return entry

    def close(self) -> None:
        pass


class _WireAdapter:
    """Shared request building and response handling for wire transports."""

    def __init__(self):
        self._ids = itertools.count(1)

    def _next_id(self) -> str:
        return f"req-{next(self._ids)}"

    def _send(self, payload: dict) -> dict:
        raise NotImplementedError

    def _call(self, payload: dict) -> dict:
        payload = {"id": self._next_id(), **payload}
        response = self._send(payload)
        if not isinstance(response, dict) or "ok" not in response:
            raise AdapterProtocolError(f"malformed response: {response!r}")
        if response.get("id") != payload["id"]:
            raise AdapterProtocolError(
                f"response id {response.get('id')!r} does not match "
                f"request id {payload['id']!r}"
            )
        if not response["ok"]:
            raise AdapterResponseError(response.get("error", "adapter error"))
        return response

    def capabilities(self) -> AdapterCapabilities:
        response = self._call({"task": "capabilities"})
        return AdapterCapabilities(
            backend=response.get("backend", "unknown"),
            tasks=tuple(response.get("tasks", ())),
            language_pairs=tuple(response.get("language_pairs", ())),
            metadata=response.get("metadata", {}),
        )

    def transcribe(self, audio: str, lang: str, beam_size: int = DEFAULT_BEAM_SIZE) -> str:
        response = self._call(
            {
                "task": "transcribe",
                "audio": audio,
                "src_lang": lang,
                "beam_size": beam_size,
            }
        )
        return self._text_of(response)

    def translate(
        self,
        text: str,
        src_lang: str,
        tgt_lang: str,
        beam_size: int = DEFAULT_BEAM_SIZE,
        return_score: bool = False,
    ) -> tuple[str, float | None]:
        response = self._call(
            {
                "task": "translate",
                "text": text,
                "src_lang": src_lang,
                "tgt_lang": tgt_lang,
                "beam_size": beam_size,
                "return_score": return_score,
            }
        )
        out = self._text_of(response)
        if not return_score:
            return out, None
        if "avg_log_prob" not in response:
            raise AdapterProtocolError("score requested but avg_log_prob missing")
        return out, _check_score(response["avg_log_prob"])

    def translate_audio(
        self,
        audio: str,
        src_lang: str,
        tgt_lang: str,
        beam_size: int = DEFAULT_BEAM_SIZE,
    ) -> str:
        response = self._call(
            {
                "task": "translate_audio",
                "audio": audio,
                "src_lang": src_lang,
                "tgt_lang": tgt_lang,
                "beam_size": beam_size,
            }
        )
        return self._text_of(response)

    @staticmethod
    def _text_of(response: dict) -> str:
        if "text" not in response or not isinstance(response["text"], str):
            raise AdapterProtocolError("ok response carries no text")
        return response["text"]

    def close(self) -> None:
        pass


class SubprocessAdapter(_WireAdapter):
    """Speaks JSONL over the standard streams of a spawned server process."""

    def __init__(self, command: str):
        super().__init__()
        argv = shlex.split(command)
        if not argv:
            raise ConfigError("empty subprocess adapter command")
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterUnreachableError(f"cannot spawn adapter {argv[0]!r}: {exc}") from exc
        self._lock = threading.Lock()
        self._pending: dict[str, dict] = {}

    def _send(self, payload: dict) -> dict:
        rid = payload["id"]
        with self._lock:
            if self._proc.poll() is not None:
                raise AdapterUnreachableError("adapter process has exited")
            try:
                self._proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise AdapterUnreachableError(f"adapter pipe failed: {exc}") from exc
            while rid not in self._pending:
                line = self._proc.stdout.readline()
                if not line:
                    raise AdapterUnreachableError("adapter closed its output stream")
                try:
                    response = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AdapterProtocolError(
                        f"adapter emitted bad JSON: {line!r}"
                    ) from exc
                # id pairing is authoritative; park out-of-order responses
                self._pending[response.get("id")] = response
            return self._pending.pop(rid)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


class HttpAdapter(_WireAdapter):
    """POSTs request bodies to the /v1/infer endpoint."""

    def __init__(self, url: str, timeout: float = 30.0):
        super().__init__()
        base = url.rstrip("/")
        self._url = base if base.endswith("/v1/infer") else base + "/v1/infer"
        self._timeout = timeout

    def _send(self, payload: dict) -> dict:
        request = urllib.request.Request(
            self._url,
            data=json.dumps(payload, ensure_ascii=False).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self._timeout) as resp:
                body = resp.read()
        except urllib.error.HTTPError as exc:
            # servers should answer 200 with ok=false; treat a JSON error
            # body as a response, anything else as unreachable
            body = exc.read()
            try:
                return json.loads(body)
            except (json.JSONDecodeError, UnicodeDecodeError):
                raise AdapterUnreachableError(f"HTTP {exc.code} from {self._url}") from exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise AdapterUnreachableError(f"cannot reach {self._url}: {exc}") from exc
        try:
            return json.loads(body)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise AdapterProtocolError(f"non-JSON response from {self._url}") from exc


def open_adapter(spec: str):
    """Open an adapter handle from an endpoint spec string."""
    if spec == "mock":
        return MockAdapter.from_file()
    if spec.startswith("mock:"):
        return MockAdapter.from_file(spec[len("mock:"):])
    if spec.startswith("subprocess:"):
        return SubprocessAdapter(spec[len("subprocess:"):])
    if spec.startswith(("http://", "https://")):
        return HttpAdapter(spec)
    raise ConfigError(
        f"bad adapter spec {spec!r} (expected mock:<fixture>, "
        "subprocess:<command>, or an HTTP URL)"
    )
