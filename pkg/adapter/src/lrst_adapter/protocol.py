"""Wire protocol: request parsing and response shaping.

One JSON object per request. Fields: ``id`` (caller-chosen, echoed
back), ``task`` (transcribe | translate | translate_audio |
capabilities), ``audio``, ``text``, ``src_lang``, ``tgt_lang``,
``beam_size`` (default 5), ``return_score``. Responses echo the id and
carry ``ok``; ``text`` when ok, ``avg_log_prob`` when a score was
requested, ``error`` when not ok.
"""

from __future__ import annotations

from dataclasses import dataclass

TASKS = ("transcribe", "translate", "translate_audio", "capabilities")
DEFAULT_BEAM_SIZE = 5

REQUEST_KEYS = frozenset(
    {"id", "task", "audio", "text", "src_lang", "tgt_lang", "beam_size", "return_score"}
)


class RequestError(Exception):
    """The request object violates the wire grammar."""


@dataclass(frozen=True)
class AdapterRequest:
    id: str
    task: str
    audio: str | None = None
    text: str | None = None
    src_lang: str | None = None
    tgt_lang: str | None = None
    beam_size: int = DEFAULT_BEAM_SIZE
    return_score: bool = False


def parse_request(obj) -> AdapterRequest:
    """Validate a decoded JSON object against the request grammar."""
    if not isinstance(obj, dict):
        raise RequestError("request is not a JSON object")
    unknown = set(obj) - REQUEST_KEYS
    if unknown:
        raise RequestError(f"unknown request keys: {sorted(unknown)}")
    request_id = obj.get("id")
    if not isinstance(request_id, str) or not request_id:
        raise RequestError("missing or empty request id")
    task = obj.get("task")
    if task not in TASKS:
        raise RequestError(f"unknown task: {task!r}")
    audio = obj.get("audio")
    text = obj.get("text")
    if task in ("transcribe", "translate_audio") and not audio:
        raise RequestError(f"task {task!r} requires 'audio'")
    if task == "translate" and not text:
        raise RequestError("task 'translate' requires non-empty 'text'")
    beam_size = obj.get("beam_size", DEFAULT_BEAM_SIZE)
    if not isinstance(beam_size, int) or beam_size < 1:
        raise RequestError(f"beam_size must be an integer >= 1, got {beam_size!r}")
    return AdapterRequest(
        id=request_id,
        task=task,
        audio=audio,
        text=text,
        src_lang=obj.get("src_lang"),
        tgt_lang=obj.get("tgt_lang"),
        beam_size=beam_size,
        return_score=bool(obj.get("return_score", False)),
    )


def ok_response(request_id: str | None, **payload) -> dict:
    return {"id": request_id, "ok": True, **payload}


def error_response(request_id: str | None, message: str) -> dict:
    return {"id": request_id, "ok": False, "error": message}
