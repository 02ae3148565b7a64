#!/usr/bin/env python3
"""Corpus handling tour: ingest, normalize, dedup, merge, stats.

Run from the repository root: python demos/01_corpus_tour.py
"""

import tempfile
from pathlib import Path

from lrst.corpus import (
    Corpus,
    Utterance,
    dedup_against,
    load_corpus,
    merge,
    normalize_text,
    stats,
    write_corpus,
)

# A small training corpus, the shape real manifests take.
train = Corpus(
    name="bigc-mini",
    split="train",
    src_lang="bem",
    tgt_lang="eng",
    utterances=(
        Utterance(id="u1", transcript="nafwala na amakalashi ku menso",
                  translation="He is wearing glasses.", audio="audio/u1.wav",
                  src_lang="bem", tgt_lang="eng"),
        Utterance(id="u2", transcript="imbwa ilebutuka palunkoto",
                  translation="A dog is running on the lawn.",
                  src_lang="bem", tgt_lang="eng"),
        Utterance(id="u3", transcript="Namayo naikata ifyakulya!",
                  translation="A woman is holding food.",
                  src_lang="bem", tgt_lang="eng"),
    ),
)

print("== corpus stats ==")
print(stats(train).to_dict())

print("\n== text normalization ==")
print(repr(normalize_text("  nafwala   na amakalashi ", "display")))
print(repr(normalize_text("Namayo naikata ifyakulya!", "dedup_key")))

# Held-out set containing a case/punctuation variant of u3: the dedup key
# matches even though the raw strings differ.
held_out = Corpus(
    name="test-mini", split="test", src_lang="bem", tgt_lang="eng",
    utterances=(
        Utterance(id="x1", transcript="namayo naikata ifyakulya",
                  src_lang="bem", tgt_lang="eng"),
    ),
)
deduped, removed = dedup_against(train, [held_out])
print(f"\n== dedup against held-out ==\nremoved {removed}, kept {[u.id for u in deduped]}")

# Round-trip through both file formats.
with tempfile.TemporaryDirectory() as tmp:
    tsv = Path(tmp) / "train.tsv"
    write_corpus(deduped, tsv, "tsv")
    print("\n== TSV on disk ==")
    print(tsv.read_text(), end="")
    reloaded = load_corpus(tsv, "tsv", name=deduped.name, split="train")
    assert reloaded == deduped, "round-trip must be exact"

# Merging corpora renames colliding ids as <corpusname>/<id>.
extra = Corpus(
    name="flores-mini", split="train", src_lang="bem", tgt_lang="eng",
    utterances=(
        Utterance(id="u1", transcript="icishimbi ekete umwaume",
                  translation="The man holds a metal rod.",
                  src_lang="bem", tgt_lang="eng"),
    ),
)
combined = merge([deduped, extra], name="combined")
print("\n== merged ids ==")
print([u.id for u in combined])
