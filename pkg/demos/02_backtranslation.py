#!/usr/bin/env python3
"""Back-translation walkthrough: synthesize, score, filter, tag, merge.

Run from the repository root: python demos/02_backtranslation.py
"""

import math
from pathlib import Path

from lrst.adapters import MockAdapter
from lrst.augment import (
    AugmentConfig,
    build_training_set,
    filter_by_quality,
    quality_from_log_prob,
    synthesize_bt_corpus,
)
from lrst.corpus import Corpus, Utterance, load_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# The engine reports a mean per-token log-probability; its exponential is
# the quality score used for filtering. Exactly-0.77 survives the default
# threshold, anything strictly below is dropped.
print("== quality transform ==")
for log_prob in (0.0, math.log(0.77), -1.0):
    print(f"avg_log_prob {log_prob:+.6f}  ->  quality {quality_from_log_prob(log_prob):.6f}")

# Monolingual English text goes through the reverse (eng->bem) direction
# of the mock translation table, keeping the per-sentence scores.
mono = load_corpus(FIXTURES / "tatoeba_mini.jsonl", "jsonl",
                   name="tatoeba-mini", split="train",
                   src_lang="eng", tgt_lang="eng")
adapter = MockAdapter.from_file(FIXTURES / "mock_adapter.json")
segments, rejects = synthesize_bt_corpus(mono, adapter, ("eng", "bem"))
print(f"\n== synthesized {len(segments)} segments, {len(rejects)} rejects ==")
for segment in segments[:4]:
    print(f"quality {segment.quality:.3f}  {segment.source_text!r} <- {segment.target_text!r}")

kept, removed = filter_by_quality(segments, threshold=0.77)
print(f"\n== filtered at 0.77: kept {len(kept)}, removed {removed} ==")

# Assemble a training set; the tag policy marks synthetic sources.
authentic = Corpus(
    name="bigc-mini", split="train", src_lang="bem", tgt_lang="eng",
    utterances=(
        Utterance(id="a1", transcript="nafwala na amakalashi",
                  translation="He is wearing glasses.",
                  src_lang="bem", tgt_lang="eng"),
    ),
)
for policy in ("prepend", "none"):
    built = build_training_set(
        authentic, segments, AugmentConfig(threshold=0.77, tag_policy=policy)
    )
    sample = built.utterances[-1].transcript if len(built) > 1 else "(no synthetic kept)"
    print(f"tag_policy={policy!r}: {len(built)} utterances, last source: {sample!r}")
