"""HTTP mirror of the wire protocol: POST /v1/infer, same JSON bodies.

Protocol errors stay at the JSON layer: bad requests get a 200 with
ok=false so clients handle one response shape on both transports.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .server import handle_object
from .protocol import error_response

INFER_PATH = "/v1/infer"


def make_handler(backend):
    class InferHandler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path != INFER_PATH:
                self.send_error(404, "unknown endpoint")
                return
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length)
            try:
                obj = json.loads(body)
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                response = error_response(None, f"parse error: {exc}")
            else:
                response = handle_object(obj, backend)
            payload = json.dumps(response, ensure_ascii=False).encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, format, *args):  # quiet by default
            pass

    return InferHandler


def make_server(backend, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Bind a threading HTTP server; port 0 picks an ephemeral port."""
    return ThreadingHTTPServer((host, port), make_handler(backend))


def serve_http(backend, host: str = "127.0.0.1", port: int = 8173) -> None:
    server = make_server(backend, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
