"""lrst: corpus engineering and evaluation for low-resource speech translation.

The toolkit covers four areas:

- ``lrst.corpus``: ingestion, normalization, deduplication, and merging of
  speech-translation corpora (TSV/JSONL).
- ``lrst.augment``: back-translated bitext scoring, quality filtering, and
  synthetic-data tagging.
- ``lrst.metrics``: from-scratch corpus-level BLEU, chrF++, and WER.
- ``lrst.cascade``: orchestration of cascaded, end-to-end, and MT-only runs
  through a model-agnostic inference adapter, plus comparison reports.

Model inference itself happens behind the wire protocol implemented by
``lrst.adapters`` clients; a deterministic table-driven mock ships for
tests and demos so nothing here needs an ML runtime.
"""

__version__ = "0.1.0"
