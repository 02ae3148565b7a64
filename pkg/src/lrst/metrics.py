"""Corpus-level translation and transcription quality metrics.

From-scratch implementations of the three scores used for system
comparison: corpus BLEU over mteval-13a tokens with exponential
smoothing, chrF++ over character and word n-grams, and word error rate
from a minimal-edit alignment.

Everything here is a pure function: corpus scores are computed from
global aggregate counts, never averaged across shards, so callers may
evaluate shards concurrently as long as they aggregate pair lists
before scoring.
"""

from __future__ import annotations

import math
import re
import string
from collections import Counter
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

__all__ = [
    "EditCounts",
    "BleuScore",
    "MetricReport",
    "tokenize_13a",
    "levenshtein_words",
    "wer",
    "bleu_corpus",
    "chrf_pp",
    "evaluate",
]

METRIC_NAMES = ("bleu", "chrf", "wer")
WER_NORMALIZATIONS = ("lowercase_nopunct", "verbatim")

# mteval-13a: characters in these ASCII ranges are always space-separated.
# '.' ',' '-' and the apostrophe are excluded and handled contextually
# (or, for the apostrophe, not split at all).
_ALWAYS_SPLIT_RE = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_BEFORE_RE = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_AFTER_RE = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")

_WORD_EDGE_PUNCT = frozenset(string.punctuation)


def tokenize_13a(text: str) -> list[str]:
    """Tokenize one segment with the mteval-v13a scheme used for BLEU.

    Periods and commas stay attached when both neighbours are digits
    (decimal and thousands separators); a dash is split off only when
    preceded by a digit, so "5-6" becomes three tokens while "e-mail"
    stays one.
    """
    norm = text.replace("-\n", "").replace("\n", " ")
    norm = f" {norm} "
    norm = _ALWAYS_SPLIT_RE.sub(r" \1 ", norm)
    norm = _PERIOD_COMMA_BEFORE_RE.sub(r"\1 \2 ", norm)
    norm = _PERIOD_COMMA_AFTER_RE.sub(r" \1 \2", norm)
    norm = _DIGIT_DASH_RE.sub(r"\1 \2 ", norm)
    return norm.split()


@dataclass(frozen=True)
class EditCounts:
    """Alignment counts from a minimal word-level edit path."""

    substitutions: int
    deletions: int
    insertions: int
    hits: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def levenshtein_words(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> EditCounts:
    """Minimal-edit alignment between token sequences with unit costs.

    The backtrace resolves cost ties in the order hit > substitution >
    deletion > insertion, so the counts are deterministic. The counts
    satisfy hits + substitutions + deletions == len(ref_tokens) and
    hits + substitutions + insertions == len(hyp_tokens).
    """
    rn, hn = len(ref_tokens), len(hyp_tokens)
    dist = [[0] * (hn + 1) for _ in range(rn + 1)]
    for i in range(1, rn + 1):
        dist[i][0] = i
    for j in range(1, hn + 1):
        dist[0][j] = j
    for i in range(1, rn + 1):
        row, prev = dist[i], dist[i - 1]
        rtok = ref_tokens[i - 1]
        for j in range(1, hn + 1):
            best = prev[j - 1] + (rtok != hyp_tokens[j - 1])
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best

    hits = subs = dels = inss = 0
    i, j = rn, hn
    while i > 0 or j > 0:
        if (
            i > 0
            and j > 0
            and ref_tokens[i - 1] == hyp_tokens[j - 1]
            and dist[i][j] == dist[i - 1][j - 1]
        ):
            hits += 1
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + 1:
            subs += 1
            i -= 1
            j -= 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return EditCounts(substitutions=subs, deletions=dels, insertions=inss, hits=hits)


def _wer_tokens(text: str, normalization: str) -> list[str]:
    if normalization == "verbatim":
        return text.split()
    if normalization == "lowercase_nopunct":
        lowered = text.lower()
        kept = "".join(c for c in lowered if c.isalnum() or c.isspace())
        return kept.split()
    raise ValueError(f"unknown WER normalization: {normalization!r}")


def wer(
    refs: Sequence[str],
    hyps: Sequence[str],
    normalization: str = "lowercase_nopunct",
) -> float:
    """Corpus word error rate: total edit distance over total reference length.

    The ratio may exceed 1.0 when insertions dominate. Default
    normalization lowercases and strips characters that are neither
    alphanumeric nor whitespace before splitting on whitespace;
    ``verbatim`` splits the raw text.
    """
    _check_pairs(refs, hyps)
    total_distance = 0
    total_ref_len = 0
    for ref, hyp in zip(refs, hyps):
        ref_tokens = _wer_tokens(ref, normalization)
        hyp_tokens = _wer_tokens(hyp, normalization)
        total_distance += levenshtein_words(ref_tokens, hyp_tokens).distance
        total_ref_len += len(ref_tokens)
    if total_ref_len == 0:
        raise ValueError("zero-length reference")
    return total_distance / total_ref_len


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU with its sufficient statistics.

    Precisions are fractions in [0, 1]; the score satisfies
    score == 100 * brevity_penalty * geometric mean of the precisions.
    """

    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int


def bleu_corpus(
    refs: Sequence[str],
    hyps: Sequence[str],
    max_n: int = 4,
    smoothing: str = "exp_halving",
) -> BleuScore:
    """Corpus BLEU over 13a tokens with clipped n-gram precisions.

    ``exp_halving`` (the default) replaces the k-th zero-count precision
    among the orders with 1 / (2^k * denominator); ``none`` makes any
    zero precision collapse the score to 0. Single reference per
    hypothesis.
    """
    if smoothing not in ("none", "exp_halving"):
        raise ValueError(f"unknown smoothing: {smoothing!r}")
    _check_pairs(refs, hyps)

    correct = [0] * max_n
    total = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for ref, hyp in zip(refs, hyps):
        ref_tokens = tokenize_13a(ref)
        hyp_tokens = tokenize_13a(hyp)
        hyp_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        for n in range(1, max_n + 1):
            hyp_grams = _ngram_counts(hyp_tokens, n)
            if not hyp_grams:
                continue
            ref_grams = _ngram_counts(ref_tokens, n)
            for gram, count in hyp_grams.items():
                total[n - 1] += count
                correct[n - 1] += min(count, ref_grams.get(gram, 0))

    precisions = [0.0] * max_n
    halving = 1.0
    for n in range(1, max_n + 1):
        if total[n - 1] == 0:
            break
        if correct[n - 1] == 0:
            if smoothing == "exp_halving":
                halving *= 2.0
                precisions[n - 1] = 1.0 / (halving * total[n - 1])
        else:
            precisions[n - 1] = correct[n - 1] / total[n - 1]

    if hyp_len == 0:
        brevity_penalty = 0.0
    elif hyp_len < ref_len:
        brevity_penalty = math.exp(1.0 - ref_len / hyp_len)
    else:
        brevity_penalty = 1.0

    if 0.0 in precisions:
        score = 0.0
    else:
        score = 100.0 * brevity_penalty * math.exp(
            sum(math.log(p) for p in precisions) / max_n
        )
    return BleuScore(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=brevity_penalty,
        hyp_len=hyp_len,
        ref_len=ref_len,
    )


def _chrf_word_tokens(text: str) -> list[str]:
    """Split leading/trailing punctuation off whitespace-delimited words."""
    tokens: list[str] = []
    for word in text.split():
        if len(word) == 1:
            tokens.append(word)
        elif word[-1] in _WORD_EDGE_PUNCT:
            tokens.extend((word[:-1], word[-1]))
        elif word[0] in _WORD_EDGE_PUNCT:
            tokens.extend((word[0], word[1:]))
        else:
            tokens.append(word)
    return tokens


def chrf_pp(
    refs: Sequence[str],
    hyps: Sequence[str],
    char_order: int = 6,
    word_order: int = 2,
    beta: float = 2.0,
) -> float:
    """chrF++ in [0, 100]: mean F-score over character and word n-gram orders.

    Character n-grams are taken over the segment with all whitespace
    removed; word n-grams over punctuation-separated words. Precision
    and recall aggregate at corpus level per order, and an order with
    neither precision nor recall contributes F = 0.
    """
    _check_pairs(refs, hyps)
    n_orders = char_order + word_order
    hyp_total = [0] * n_orders
    ref_total = [0] * n_orders
    matched = [0] * n_orders

    for ref, hyp in zip(refs, hyps):
        ref_chars = "".join(ref.split())
        hyp_chars = "".join(hyp.split())
        for n in range(1, char_order + 1):
            k = n - 1
            hyp_grams = Counter(
                hyp_chars[i : i + n] for i in range(len(hyp_chars) - n + 1)
            )
            ref_grams = Counter(
                ref_chars[i : i + n] for i in range(len(ref_chars) - n + 1)
            )
            hyp_total[k] += sum(hyp_grams.values())
            ref_total[k] += sum(ref_grams.values())
            matched[k] += sum((hyp_grams & ref_grams).values())
        ref_words = _chrf_word_tokens(ref)
        hyp_words = _chrf_word_tokens(hyp)
        for n in range(1, word_order + 1):
            k = char_order + n - 1
            hyp_grams = _ngram_counts(hyp_words, n)
            ref_grams = _ngram_counts(ref_words, n)
            hyp_total[k] += sum(hyp_grams.values())
            ref_total[k] += sum(ref_grams.values())
            matched[k] += sum((hyp_grams & ref_grams).values())

    beta_sq = beta * beta
    f_sum = 0.0
    for k in range(n_orders):
        precision = matched[k] / hyp_total[k] if hyp_total[k] else 0.0
        recall = matched[k] / ref_total[k] if ref_total[k] else 0.0
        denom = beta_sq * precision + recall
        if denom > 0.0:
            f_sum += (1.0 + beta_sq) * precision * recall / denom
    return 100.0 * f_sum / n_orders


@dataclass(frozen=True)
class MetricReport:
    """Aggregate evaluation result; unrequested metrics stay None.

    ``comet`` is never computed here: it is populated only when a score
    from an external semantic scorer is injected.
    """

    segment_count: int
    bleu: float | None = None
    chrf_pp: float | None = None
    wer: float | None = None
    precisions: tuple[float, ...] | None = None
    brevity_penalty: float | None = None
    hyp_len: int | None = None
    ref_len: int | None = None
    comet: float | None = None

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "precisions":
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown metric report keys: {sorted(unknown)}")
        payload = dict(data)
        if "precisions" in payload and payload["precisions"] is not None:
            payload["precisions"] = tuple(payload["precisions"])
        return cls(**payload)


def evaluate(
    refs: Sequence[str],
    hyps: Sequence[str],
    metrics: Iterable[str] = METRIC_NAMES,
    wer_normalization: str = "lowercase_nopunct",
    comet: float | None = None,
) -> MetricReport:
    """Score a corpus with the requested subset of {bleu, chrf, wer}."""
    requested = tuple(metrics)
    unknown = set(requested) - set(METRIC_NAMES)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    if not requested:
        raise ValueError("no metrics requested")
    _check_pairs(refs, hyps)

    bleu_val = chrf_val = wer_val = None
    precisions = brevity_penalty = hyp_len = ref_len = None
    if "bleu" in requested:
        bleu = bleu_corpus(refs, hyps)
        bleu_val = bleu.score
        precisions = bleu.precisions
        brevity_penalty = bleu.brevity_penalty
        hyp_len = bleu.hyp_len
        ref_len = bleu.ref_len
    if "chrf" in requested:
        chrf_val = chrf_pp(refs, hyps)
    if "wer" in requested:
        wer_val = wer(refs, hyps, normalization=wer_normalization)
    return MetricReport(
        segment_count=len(refs),
        bleu=bleu_val,
        chrf_pp=chrf_val,
        wer=wer_val,
        precisions=precisions,
        brevity_penalty=brevity_penalty,
        hyp_len=hyp_len,
        ref_len=ref_len,
        comet=comet,
    )


def _check_pairs(refs: Sequence[str], hyps: Sequence[str]) -> None:
    if len(refs) != len(hyps):
        raise ValueError(
            f"reference/hypothesis length mismatch: {len(refs)} vs {len(hyps)}"
        )
    if len(refs) == 0:
        raise ValueError("empty corpus")
