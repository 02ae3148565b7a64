"""Inference adapter server for speech-translation pipelines.

Serves transcription, text translation with sentence scores, and direct
audio translation over two transports: newline-delimited JSON on the
standard streams (primary) and an HTTP mirror (POST /v1/infer). Backends
plug in behind a small interface; the shipped backend is a deterministic
table-driven mock so orchestrators and tests run without any model
runtime. Scores cross the wire as mean per-token natural-log
probabilities regardless of what a backend natively reports.
"""

__version__ = "0.1.0"
