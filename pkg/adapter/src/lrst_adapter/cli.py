"""Command-line entry point: ``lrst-adapter serve``."""

from __future__ import annotations

import argparse
import sys

from .backend import SCORE_MODES, MockBackend
from .httpd import serve_http
from .server import serve_stdio


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrst-adapter",
        description="Serve the inference wire protocol (JSONL on stdio, or HTTP).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="answer requests until the stream closes")
    p.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    p.add_argument("--fixture", default=None,
                   help="mock table JSON (default: $LRST_ADAPTER_FIXTURE)")
    p.add_argument("--score-mode", choices=SCORE_MODES, default=None,
                   help="override the fixture's score mode")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8173)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        backend = MockBackend.from_file(args.fixture, score_mode=args.score_mode)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.transport == "stdio":
        serve_stdio(backend)
    else:
        serve_http(backend, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
