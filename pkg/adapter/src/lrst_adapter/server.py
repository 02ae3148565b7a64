"""Request dispatch and the stdio JSONL serving loop.

One response per request; the server may process sequentially and
clients pair responses to requests by id. Liveness under bad input: a
malformed or failing request produces an ok=false response (id null
when no id is recoverable) and the loop keeps serving.
"""

from __future__ import annotations

import json
import sys
from typing import IO

from .backend import BackendError, UnsupportedError, normalize_score
from .protocol import RequestError, error_response, ok_response, parse_request


def handle_object(obj, backend) -> dict:
    """Answer one decoded request object; never raises."""
    request_id = obj.get("id") if isinstance(obj, dict) else None
    if isinstance(request_id, str) and not request_id:
        request_id = None
    try:
        request = parse_request(obj)
    except RequestError as exc:
        return error_response(request_id, str(exc))
    try:
        if request.task == "capabilities":
            return ok_response(request.id, **backend.capabilities())
        if request.task == "transcribe":
            text = backend.transcribe(request.audio, request.src_lang, request.beam_size)
            return ok_response(request.id, text=text)
        if request.task == "translate_audio":
            text = backend.translate_audio(
                request.audio, request.src_lang, request.tgt_lang, request.beam_size
            )
            return ok_response(request.id, text=text)
        # translate
        text, raw_score = backend.translate(
            request.text, request.src_lang, request.tgt_lang, request.beam_size
        )
        if not request.return_score:
            return ok_response(request.id, text=text)
        avg_log_prob = normalize_score(raw_score, backend.score_mode, text)
        if avg_log_prob > 0:
            return error_response(
                request.id,
                f"backend produced a positive score: {avg_log_prob!r}",
            )
        return ok_response(request.id, text=text, avg_log_prob=avg_log_prob)
    except (BackendError, UnsupportedError) as exc:
        return error_response(request.id, str(exc))
    except Exception as exc:  # keep serving whatever the backend does
        return error_response(request.id, f"internal error: {exc}")


def handle_line(line: str, backend) -> dict | None:
    """Answer one raw request line; blank lines are skipped (None)."""
    if not line.strip():
        return None
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return error_response(None, f"parse error: {exc.msg}")
    return handle_object(obj, backend)


def serve_stdio(backend, stdin: IO[str] | None = None, stdout: IO[str] | None = None) -> None:
    """Serve newline-delimited JSON until the input stream closes."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        response = handle_line(line, backend)
        if response is None:
            continue
        stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
        stdout.flush()
