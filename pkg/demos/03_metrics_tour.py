#!/usr/bin/env python3
"""Metrics tour: 13a tokenization, edit alignment, WER, BLEU, chrF++.

Run from the repository root: python demos/03_metrics_tour.py
"""

import json
from pathlib import Path

from lrst.metrics import (
    bleu_corpus,
    chrf_pp,
    evaluate,
    levenshtein_words,
    tokenize_13a,
    wer,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

print("== 13a tokenization ==")
for text in ("Hello, world!", "3.14 is pi", "pages 5-6 of the e-mail", "it's fine"):
    print(f"{text!r:35} -> {tokenize_13a(text)}")

print("\n== word-level edit alignment ==")
ref = "a b c d e".split()
hyp = "a x c e".split()
counts = levenshtein_words(ref, hyp)
print(f"ref={ref} hyp={hyp}")
print(f"{counts} distance={counts.distance}")

print("\n== corpus scores on a fixture ==")
fixture = json.loads((FIXTURES / "metric_corpus_close.json").read_text())
refs, hyps = fixture["refs"], fixture["hyps"]
bleu = bleu_corpus(refs, hyps)
print(f"BLEU   {bleu.score:.2f}  (precisions "
      f"{' / '.join(f'{p:.3f}' for p in bleu.precisions)}, BP {bleu.brevity_penalty:.3f})")
print(f"chrF++ {chrf_pp(refs, hyps):.2f}")
print(f"WER    {wer(refs, hyps):.3f}  (lowercase_nopunct)")
print(f"WER    {wer(refs, hyps, normalization='verbatim'):.3f}  (verbatim)")

print("\n== bundled report ==")
report = evaluate(refs, hyps, metrics=("bleu", "chrf", "wer"))
print(json.dumps(report.to_dict(), indent=2))

print("\n== frozen oracle expectations for the same fixture ==")
print(json.dumps(fixture["expected"], indent=2))
