#!/usr/bin/env python3
"""Run cascaded, end-to-end, and MT-only systems and compare them.

Everything goes through the deterministic mock adapter, so this runs
without any model runtime. Run from the repository root:
python demos/04_pipeline_compare.py
"""

from pathlib import Path

from lrst.adapters import MockAdapter
from lrst.cascade import (
    PipelineConfig,
    compare,
    recompute_aggregates,
    run_cascaded,
    run_end_to_end,
    run_mt_only,
)
from lrst.corpus import load_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

corpus = load_corpus(FIXTURES / "pipeline_20.jsonl", "jsonl",
                     name="pipeline-fixture", split="test",
                     src_lang="bem", tgt_lang="eng")
adapter = MockAdapter.from_file(FIXTURES / "mock_adapter.json")


def config(mode, label):
    return PipelineConfig(mode=mode, adapter="mock:bundled", label=label,
                          metrics=("bleu", "chrf"))


cascaded = run_cascaded(corpus, config("cascaded", "Cascaded"), adapter=adapter)
end_to_end = run_end_to_end(corpus, config("end_to_end", "End-to-End"), adapter=adapter)
mt_only = run_mt_only(corpus, config("mt_only", "MT-only"), adapter=adapter)

print(f"corpus: {corpus.name} ({len(corpus)} utterances, {corpus.language_pair})")
print(f"adapter: {adapter.capabilities().backend}, "
      f"metadata {dict(adapter.capabilities().metadata)}\n")

for report in (cascaded, end_to_end, mt_only):
    wer_note = ""
    if report.asr_metrics:
        wer_note = f", ASR WER {report.asr_metrics.wer:.3f}"
    print(f"{report.label:<11} evaluated {report.evaluated}, failed {report.failed}, "
          f"BLEU {report.metrics.bleu:.2f}, chrF++ {report.metrics.chrf_pp:.2f}{wer_note}")

print("\n== markdown comparison (best bold, second-best underlined) ==")
print(compare([cascaded, end_to_end, mt_only], format="markdown"))

print("\n== csv ==")
print(compare([cascaded, end_to_end, mt_only], format="csv"))

# Reports are self-verifying: the aggregates can be recomputed from the
# stored per-utterance outputs alone.
metrics, asr_metrics = recompute_aggregates(cascaded)
assert metrics == cascaded.metrics and asr_metrics == cascaded.asr_metrics
print("\nself-verification: recomputed aggregates match the stored report")
