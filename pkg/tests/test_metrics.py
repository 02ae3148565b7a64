import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrst.metrics import (
    EditCounts,
    MetricReport,
    bleu_corpus,
    chrf_pp,
    evaluate,
    levenshtein_words,
    tokenize_13a,
    wer,
)
from oracles import oracle_bleu, oracle_chrf_pp, oracle_edit_distance

TOKENS = st.lists(st.sampled_from("a b c d e f g".split()), max_size=12)


class TestTokenize13a:
    def test_punctuation_split(self):
        assert tokenize_13a("Hello, world!") == ["Hello", ",", "world", "!"]

    def test_digit_adjacent_period_kept(self):
        assert tokenize_13a("3.14") == ["3.14"]

    def test_empty(self):
        assert tokenize_13a("") == []

    def test_digit_comma_kept(self):
        assert tokenize_13a("1,000 dogs.") == ["1,000", "dogs", "."]

    def test_dash_split_after_digit_only(self):
        assert tokenize_13a("pages 5-6 of e-mail") == ["pages", "5", "-", "6", "of", "e-mail"]

    def test_apostrophe_kept(self):
        assert tokenize_13a("it's fine") == ["it's", "fine"]

    def test_newline_and_hyphenation(self):
        assert tokenize_13a("over-\nlap and\nmore") == ["overlap", "and", "more"]


class TestLevenshtein:
    def test_identical(self):
        counts = levenshtein_words(list("abcde"), list("abcde"))
        assert counts == EditCounts(substitutions=0, deletions=0, insertions=0, hits=5)

    def test_empty_hypothesis(self):
        counts = levenshtein_words(list("abcde"), [])
        assert counts.deletions == 5 and counts.distance == 5

    def test_empty_reference(self):
        counts = levenshtein_words([], list("abc"))
        assert counts.insertions == 3 and counts.distance == 3

    def test_sub_plus_deletion(self):
        counts = levenshtein_words("a b c d e".split(), "a x c e".split())
        assert counts.substitutions == 1
        assert counts.deletions == 1
        assert counts.insertions == 0
        assert counts.distance == 2

    @given(ref=TOKENS, hyp=TOKENS)
    def test_bookkeeping_identities(self, ref, hyp):
        counts = levenshtein_words(ref, hyp)
        assert counts.hits + counts.substitutions + counts.deletions == len(ref)
        assert counts.hits + counts.substitutions + counts.insertions == len(hyp)

    @given(ref=TOKENS, hyp=TOKENS)
    def test_distance_matches_plain_dp(self, ref, hyp):
        assert levenshtein_words(ref, hyp).distance == oracle_edit_distance(ref, hyp)

    @given(tokens=TOKENS)
    def test_self_distance_zero(self, tokens):
        assert levenshtein_words(tokens, tokens).distance == 0


class TestWer:
    def test_identity_zero(self):
        assert wer(["a b c"], ["a b c"]) == 0.0

    def test_one_in_five(self):
        assert wer(["a b c d e"], ["a x c d e"]) == 0.2

    def test_corpus_additivity(self):
        # distances 2 and 1 over reference lengths 5 and 5
        refs = ["a b c d e", "a b c d e"]
        hyps = ["a x y d e", "a b c d x"]
        assert wer(refs, hyps) == 0.3

    def test_can_exceed_one(self):
        assert wer(["a"], ["x y z"]) == 3.0

    def test_lowercase_nopunct_default(self):
        assert wer(["Hello, World!"], ["hello world"]) == 0.0

    def test_verbatim_counts_case(self):
        assert wer(["Hello world"], ["hello world"], normalization="verbatim") == 0.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            wer(["a"], ["a", "b"])

    def test_zero_length_reference(self):
        with pytest.raises(ValueError, match="zero-length reference"):
            wer(["..."], ["a"])

    def test_triangle_bound(self):
        rng = random.Random(5)
        for _ in range(100):
            ref = [rng.choice("ab") for _ in range(rng.randint(0, 8))]
            hyp = [rng.choice("ab") for _ in range(rng.randint(0, 8))]
            assert levenshtein_words(ref, hyp).distance <= len(ref) + len(hyp)

    def test_swap_symmetric_only_at_equal_lengths(self):
        # the edit distance itself is symmetric; the ratio is symmetric
        # exactly when both corpora have the same total token count
        rng = random.Random(6)
        for _ in range(100):
            ref = " ".join(rng.choice("abcd") for _ in range(rng.randint(1, 8)))
            hyp = " ".join(rng.choice("abcd") for _ in range(rng.randint(1, 8)))
            forward, backward = wer([ref], [hyp]), wer([hyp], [ref])
            if len(ref.split()) == len(hyp.split()):
                assert forward == backward
            else:
                assert forward * len(ref.split()) == backward * len(hyp.split())


class TestBleu:
    def test_identity_is_100(self):
        result = bleu_corpus(["the cat sat on the mat"], ["the cat sat on the mat"])
        assert result.score == 100.0
        assert result.precisions == (1.0, 1.0, 1.0, 1.0)
        assert result.brevity_penalty == 1.0

    def test_disjoint_unigrams_zero_unsmoothed(self):
        result = bleu_corpus(["a b c d e"], ["v w x y z"], smoothing="none")
        assert result.score == 0.0

    def test_disjoint_unigrams_zero_even_smoothed(self):
        # exp smoothing rescues zero counts only above order 1 here
        result = bleu_corpus(["a b c d e"], ["v w x y z"], smoothing="exp_halving")
        assert result.score > 0.0  # all four orders smoothed, tiny but nonzero

    def test_score_is_bp_times_geometric_mean(self, metric_fixtures):
        for fixture in metric_fixtures:
            result = bleu_corpus(fixture["refs"], fixture["hyps"])
            geo = math.exp(sum(math.log(p) for p in result.precisions) / 4)
            assert result.score == pytest.approx(
                100.0 * result.brevity_penalty * geo, abs=1e-9
            )

    def test_matches_frozen_oracle(self, metric_fixtures):
        for fixture in metric_fixtures:
            result = bleu_corpus(fixture["refs"], fixture["hyps"])
            assert result.score == pytest.approx(fixture["expected"]["bleu"], abs=0.01)

    def test_permutation_invariance(self):
        refs = ["a b c", "d e f", "g h i j"]
        hyps = ["a b x", "d e f", "g x i j"]
        base = bleu_corpus(refs, hyps).score
        order = [2, 0, 1]
        shuffled = bleu_corpus([refs[i] for i in order], [hyps[i] for i in order]).score
        assert shuffled == base

    def test_monotone_degradation(self):
        rng = random.Random(11)
        vocab = "a b c d e f g h".split()
        for _ in range(50):
            refs = [" ".join(rng.choice(vocab) for _ in range(rng.randint(4, 9)))]
            hyps = [refs[0]]
            before = bleu_corpus(refs, hyps, smoothing="none").score
            tokens = hyps[0].split()
            tokens[rng.randrange(len(tokens))] = "UNSEEN"
            after = bleu_corpus(refs, [" ".join(tokens)], smoothing="none").score
            assert after <= before

    def test_brevity_penalty_short_hypothesis(self):
        result = bleu_corpus(["a b c d e f g h"], ["a b c d"])
        assert result.brevity_penalty == pytest.approx(math.exp(1 - 8 / 4))

    def test_errors(self):
        with pytest.raises(ValueError, match="mismatch"):
            bleu_corpus(["a"], [])
        with pytest.raises(ValueError, match="empty"):
            bleu_corpus([], [])
        with pytest.raises(ValueError, match="smoothing"):
            bleu_corpus(["a"], ["a"], smoothing="floor")


class TestChrfPP:
    def test_identity_is_100(self):
        refs = ["the cat sat on the mat", "a dog runs over the lawn"]
        assert chrf_pp(refs, refs) == pytest.approx(100.0)

    def test_empty_hypothesis_zero(self):
        assert chrf_pp(["some reference text"], [""]) == 0.0

    def test_matches_frozen_oracle(self, metric_fixtures):
        for fixture in metric_fixtures:
            score = chrf_pp(fixture["refs"], fixture["hyps"])
            assert score == pytest.approx(fixture["expected"]["chrf_pp"], abs=0.01)

    def test_matches_live_oracle_on_random_corpora(self):
        rng = random.Random(21)
        vocab = "alpha beta gamma delta eps zeta".split()
        for _ in range(20):
            n = rng.randint(1, 15)
            refs = [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 9))) for _ in range(n)]
            hyps = [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 9))) for _ in range(n)]
            assert chrf_pp(refs, hyps) == pytest.approx(oracle_chrf_pp(refs, hyps), abs=1e-9)

    def test_permutation_invariance(self):
        refs = ["a b c", "d e f", "g h i j"]
        hyps = ["a b x", "d e f", "g x i j"]
        order = [1, 2, 0]
        assert chrf_pp([refs[i] for i in order], [hyps[i] for i in order]) == chrf_pp(refs, hyps)


class TestEvaluate:
    def test_requested_subset_only(self):
        report = evaluate(["a b"], ["a b"], metrics=("bleu",))
        assert report.bleu is not None
        assert report.wer is None
        assert report.chrf_pp is None
        assert "wer" not in report.to_dict()

    def test_identity_all_metrics(self):
        report = evaluate(["the cat sat on the mat"], ["the cat sat on the mat"])
        assert report.bleu == 100.0
        assert report.chrf_pp == pytest.approx(100.0)
        assert report.wer == 0.0
        assert report.segment_count == 1

    def test_fixture_values(self, metric_fixtures):
        for fixture in metric_fixtures:
            report = evaluate(fixture["refs"], fixture["hyps"])
            assert report.bleu == pytest.approx(fixture["expected"]["bleu"], abs=0.01)
            assert report.chrf_pp == pytest.approx(fixture["expected"]["chrf_pp"], abs=0.01)
            assert report.wer == fixture["expected"]["wer"]
            assert report.segment_count == len(fixture["refs"])

    def test_comet_injected_never_computed(self):
        report = evaluate(["a"], ["a"], metrics=("bleu",), comet=51.74)
        assert report.comet == 51.74
        assert evaluate(["a"], ["a"], metrics=("bleu",)).comet is None

    def test_unknown_metric(self):
        with pytest.raises(ValueError, match="unknown metrics"):
            evaluate(["a"], ["a"], metrics=("bleu", "comet"))

    def test_report_roundtrip(self):
        report = evaluate(["a b c"], ["a x c"])
        assert MetricReport.from_dict(report.to_dict()) == report

    @settings(max_examples=50)
    @given(st.lists(st.text(min_size=1), min_size=1, max_size=5))
    def test_purity_same_inputs_same_outputs(self, texts):
        refs = texts
        hyps = [t + " x" for t in texts]
        assert bleu_corpus(refs, hyps) == bleu_corpus(refs, hyps)
        assert chrf_pp(refs, hyps) == chrf_pp(refs, hyps)
