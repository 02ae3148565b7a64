import json

import pytest

from lrst.adapters import MockAdapter
from lrst.cascade import (
    PipelineConfig,
    RunReport,
    UtteranceResult,
    compare,
    load_config,
    load_report,
    recompute_aggregates,
    run_cascaded,
    run_end_to_end,
    run_mt_only,
    save_report,
)
from lrst.corpus import Corpus, Utterance
from lrst.errors import CapabilityError, ConfigError
from lrst.metrics import evaluate


def small_corpus(n=2, audio=True, translation=True):
    utterances = []
    for i in range(1, n + 1):
        utterances.append(
            Utterance(
                id=f"u{i}",
                transcript=f"ilyashi line number {i} lilembelwe",
                translation=f"Story line number {i} is written down." if translation else None,
                audio=f"audio/u{i}.wav" if audio else None,
                src_lang="bem",
                tgt_lang="eng",
            )
        )
    return Corpus(name="small", split="test", src_lang="bem", tgt_lang="eng",
                  utterances=tuple(utterances))


def identity_adapter():
    return MockAdapter({"language_pairs": ["bem-eng"], "identity_fallback": True})


def config(mode, **kwargs):
    kwargs.setdefault("adapter", "mock:unused")
    return PipelineConfig(mode=mode, **kwargs)


class TestLoadConfig:
    def test_minimal_defaults_beam_5(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"mode": "cascaded", "adapter": "mock:m.json"}', encoding="utf-8")
        loaded = load_config(path)
        assert loaded.beam_size == 5
        assert loaded.tag_policy == "strip"
        assert loaded.concurrency_limit == 4

    def test_beam_size_zero_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"mode": "cascaded", "adapter": "a", "beam_size": 0}',
                        encoding="utf-8")
        with pytest.raises(ConfigError, match="beam_size"):
            load_config(path)

    def test_unknown_key_named(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"mode": "cascaded", "adapter": "a", "beamsize": 5}',
                        encoding="utf-8")
        with pytest.raises(ConfigError, match="beamsize"):
            load_config(path)

    def test_missing_required(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"mode": "cascaded"}', encoding="utf-8")
        with pytest.raises(ConfigError, match="adapter"):
            load_config(path)

    def test_training_metadata_carried(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "mode": "mt_only", "adapter": "a",
            "training_metadata": {"learning_rate": 1e-4, "warmup_ratio": 0.03,
                                  "epochs": 3},
        }), encoding="utf-8")
        loaded = load_config(path)
        assert loaded.training_metadata["learning_rate"] == 1e-4


class TestRunCascaded:
    def test_two_utterance_fixture(self, mock_adapter, pipeline_corpus):
        two = Corpus(
            name="two", split="test", src_lang="bem", tgt_lang="eng",
            utterances=pipeline_corpus.utterances[:2],
        )
        report = run_cascaded(two, config("cascaded"), adapter=mock_adapter)
        assert len(report.results) == 2
        assert report.evaluated == 2 and report.failed == 0
        assert report.metrics.segment_count == 2
        assert report.asr_metrics.wer is not None
        for result in report.results:
            assert result.hyp_transcript is not None
            assert result.hyp_translation is not None

    def test_identity_mock_gives_perfect_scores(self):
        corpus = small_corpus()
        adapter = MockAdapter({
            "language_pairs": ["bem-eng"],
            "identity_fallback": True,
            "transcribe": {u.audio: u.transcript for u in corpus.utterances},
            "translate": {"bem-eng": {u.transcript: u.translation
                                      for u in corpus.utterances}},
        })
        report = run_cascaded(corpus, config("cascaded", metrics=("bleu", "chrf")),
                              adapter=adapter)
        assert report.metrics.bleu == 100.0
        assert report.asr_metrics.wer == 0.0

    def test_fail_soft_accounting(self, mock_adapter, pipeline_corpus):
        broken = Utterance(id="u99", transcript="ta kuli", translation="Broken.",
                           audio="audio/broken.wav", src_lang="bem", tgt_lang="eng")
        corpus = Corpus(name="with-broken", split="test", src_lang="bem",
                        tgt_lang="eng",
                        utterances=pipeline_corpus.utterances[:3] + (broken,))
        report = run_cascaded(corpus, config("cascaded"), adapter=mock_adapter)
        assert report.failed == 1
        assert report.evaluated == 3
        assert report.failed + report.evaluated == len(corpus)
        failed = [r for r in report.results if r.failed]
        assert failed[0].id == "u99"
        assert "decode failure" in failed[0].error
        assert report.metrics.segment_count == 3

    def test_strict_mode_aborts(self, mock_adapter, pipeline_corpus):
        broken = Utterance(id="u99", transcript="ta kuli", translation="Broken.",
                           audio="audio/broken.wav", src_lang="bem", tgt_lang="eng")
        corpus = Corpus(name="with-broken", split="test", src_lang="bem",
                        tgt_lang="eng", utterances=(broken,) + pipeline_corpus.utterances[:1])
        from lrst.errors import AdapterResponseError
        with pytest.raises(AdapterResponseError):
            run_cascaded(corpus, config("cascaded", strict=True), adapter=mock_adapter)

    def test_audio_required(self, mock_adapter):
        with pytest.raises(ValueError, match="no audio"):
            run_cascaded(small_corpus(audio=False), config("cascaded"),
                         adapter=mock_adapter)

    def test_references_required(self, mock_adapter):
        with pytest.raises(ValueError, match="reference translation"):
            run_cascaded(small_corpus(translation=False), config("cascaded"),
                         adapter=mock_adapter)

    def test_empty_corpus(self, mock_adapter):
        empty = Corpus(name="empty", split="test", src_lang="bem", tgt_lang="eng",
                       utterances=())
        with pytest.raises(ValueError, match="empty corpus"):
            run_cascaded(empty, config("cascaded"), adapter=mock_adapter)

    def test_mode_mismatch(self, mock_adapter):
        with pytest.raises(ConfigError, match="mode"):
            run_cascaded(small_corpus(), config("mt_only"), adapter=mock_adapter)


class TestRunEndToEnd:
    def test_no_transcripts_in_report(self, mock_adapter, pipeline_corpus):
        report = run_end_to_end(pipeline_corpus, config("end_to_end"),
                                adapter=mock_adapter)
        assert report.evaluated == 20
        assert report.asr_metrics is None
        assert all(r.hyp_transcript is None for r in report.results)

    def test_capability_error_before_any_work(self, pipeline_corpus):
        asr_only = MockAdapter({
            "language_pairs": ["bem-eng"],
            "transcribe": {"a": "b"},
        })
        with pytest.raises(CapabilityError, match="translate_audio"):
            run_end_to_end(pipeline_corpus, config("end_to_end"), adapter=asr_only)

    def test_comparison_shape_two_rows(self, mock_adapter, pipeline_corpus):
        cascaded = run_cascaded(pipeline_corpus,
                                config("cascaded", label="Cascaded"),
                                adapter=mock_adapter)
        end_to_end = run_end_to_end(pipeline_corpus,
                                    config("end_to_end", label="End-to-End"),
                                    adapter=mock_adapter)
        table = compare([cascaded, end_to_end])
        rows = [line for line in table.splitlines() if line.startswith("| ")]
        assert len(rows) == 3  # header + two systems
        assert "Cascaded" in table and "End-to-End" in table


class TestRunMtOnly:
    def test_identity_mock_bleu_100(self):
        corpus = small_corpus(audio=False)
        adapter = MockAdapter({
            "language_pairs": ["bem-eng"],
            "translate": {"bem-eng": {u.transcript: u.translation
                                      for u in corpus.utterances}},
        })
        report = run_mt_only(corpus, config("mt_only", metrics=("bleu",)),
                             adapter=adapter)
        assert report.metrics.bleu == pytest.approx(100.0)

    def test_tag_policy_strip_untags_before_sending(self):
        seen = []

        class SpyAdapter(MockAdapter):
            def translate(self, text, src, tgt, beam_size=5, return_score=False):
                seen.append(text)
                return super().translate(text, src, tgt, beam_size, return_score)

        spy = SpyAdapter({"language_pairs": ["bem-eng"], "identity_fallback": True})
        corpus = Corpus(
            name="tagged", split="train", src_lang="bem", tgt_lang="eng",
            utterances=(
                Utterance(id="s1", transcript="<bt> nafwala", translation="X.",
                          src_lang="bem", tgt_lang="eng", origin="synthetic",
                          quality=0.9),
            ),
        )
        run_mt_only(corpus, config("mt_only", tag_policy="strip"), adapter=spy)
        assert seen == ["nafwala"]
        seen.clear()
        run_mt_only(corpus, config("mt_only", tag_policy="keep"), adapter=spy)
        assert seen == ["<bt> nafwala"]

    def test_segment_count_bookkeeping(self):
        n = 997
        utterances = tuple(
            Utterance(id=f"f{i}", transcript=f"sentence {i}",
                      translation=f"Sentence {i}.", src_lang="bem", tgt_lang="eng")
            for i in range(n)
        )
        corpus = Corpus(name="flores-shaped", split="dev", src_lang="bem",
                        tgt_lang="eng", utterances=utterances)
        report = run_mt_only(corpus, config("mt_only", metrics=("bleu",)),
                             adapter=identity_adapter())
        assert report.metrics.segment_count == n


class TestReportInvariants:
    def test_self_verification(self, mock_adapter, pipeline_corpus):
        report = run_cascaded(pipeline_corpus, config("cascaded"),
                              adapter=mock_adapter)
        metrics, asr_metrics = recompute_aggregates(report)
        assert metrics == report.metrics
        assert asr_metrics == report.asr_metrics

    def test_determinism_same_config(self, mock_adapter, pipeline_corpus):
        first = run_cascaded(pipeline_corpus, config("cascaded"), adapter=mock_adapter)
        second = run_cascaded(pipeline_corpus, config("cascaded"), adapter=mock_adapter)
        assert first.results_fingerprint() == second.results_fingerprint()

    def test_concurrency_transparency(self, mock_adapter, pipeline_corpus):
        lone = run_cascaded(pipeline_corpus,
                            config("cascaded", concurrency_limit=1),
                            adapter=mock_adapter)
        many = run_cascaded(pipeline_corpus,
                            config("cascaded", concurrency_limit=8),
                            adapter=mock_adapter)
        assert lone.results_fingerprint() == many.results_fingerprint()

    def test_report_json_roundtrip(self, mock_adapter, pipeline_corpus, tmp_path):
        report = run_cascaded(pipeline_corpus, config("cascaded"),
                              adapter=mock_adapter)
        path = tmp_path / "report.json"
        save_report(report, path)
        loaded = load_report(path)
        assert loaded == report

    def test_config_snapshot_carries_capabilities(self, mock_adapter, pipeline_corpus):
        report = run_cascaded(pipeline_corpus, config("cascaded"),
                              adapter=mock_adapter)
        assert report.config["adapter_capabilities"]["metadata"]["compute_type"] == "float16"
        assert report.config["beam_size"] == 5


def report_from_files(label, refs, hyps, metrics=("bleu", "chrf")):
    results = tuple(
        UtteranceResult(id=str(i), ref_translation=r, hyp_translation=h)
        for i, (r, h) in enumerate(zip(refs, hyps))
    )
    return RunReport(
        label=label, mode="mt_only", results=results,
        metrics=evaluate(refs, hyps, metrics=metrics),
        asr_metrics=None, config={}, evaluated=len(results), failed=0,
        duration_seconds=0.0,
    )


class TestCompare:
    def eval_reports(self, fixtures_dir):
        refs = (fixtures_dir / "replay_refs.txt").read_text().splitlines()
        baseline = (fixtures_dir / "replay_hyps_baseline.txt").read_text().splitlines()
        finetuned = (fixtures_dir / "replay_hyps_finetuned.txt").read_text().splitlines()
        return (
            report_from_files("Baseline", refs, baseline),
            report_from_files("Finetuned", refs, finetuned),
        )

    def test_single_report_single_row(self, fixtures_dir):
        baseline, _ = self.eval_reports(fixtures_dir)
        table = compare([baseline])
        assert table.count("\n") == 2  # header, divider, one row
        assert "Baseline" in table

    def test_best_value_bolded(self, fixtures_dir):
        baseline, finetuned = self.eval_reports(fixtures_dir)
        table = compare([baseline, finetuned])
        finetuned_row = next(l for l in table.splitlines() if "Finetuned" in l)
        baseline_row = next(l for l in table.splitlines() if "Baseline" in l)
        assert "**" in finetuned_row
        assert "**" not in baseline_row
        assert "<u>" in baseline_row  # second best underlined

    def test_two_decimal_rendering(self, fixtures_dir):
        baseline, finetuned = self.eval_reports(fixtures_dir)
        table = compare([baseline, finetuned], format="csv")
        for line in table.splitlines()[1:]:
            for cell in line.split(",")[1:]:
                assert cell == "" or len(cell.split(".")[-1]) == 2

    def test_json_roundtrips_full_precision(self, fixtures_dir):
        baseline, finetuned = self.eval_reports(fixtures_dir)
        rows = json.loads(compare([baseline, finetuned], format="json"))
        assert rows[0]["bleu"] == baseline.metrics.bleu
        assert rows[1]["chrf_pp"] == finetuned.metrics.chrf_pp

    def test_wer_column_lower_is_better(self):
        good = report_from_files("Good", ["a b c"], ["a b c"], metrics=("wer",))
        bad = report_from_files("Bad", ["a b c"], ["x y z"], metrics=("wer",))
        table = compare([good, bad])
        good_row = next(l for l in table.splitlines() if "Good" in l)
        assert "**0.00**" in good_row

    def test_empty_reports_rejected(self):
        with pytest.raises(ValueError, match="no reports"):
            compare([])
