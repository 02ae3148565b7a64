"""Independent reference implementations used only to check the library.

These deliberately share no code with ``lrst.metrics``: tokenization is
kept as whole strings, n-grams are space-joined string keys, precisions
are percentages, and the BLEU log floor mirrors the reference scoring
toolkit. Fixture expectations are frozen from these functions; the test
suite also calls them directly for spot checks.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from string import punctuation

_ORACLE_LOG_FLOOR = -9999999999


def oracle_tokenize_13a(line: str) -> str:
    """mteval-v13a tokenization, returning the retokenized string."""
    norm = line
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    norm = " {} ".format(norm)
    norm = re.sub(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])", " \\1 ", norm)
    norm = re.sub(r"([^0-9])([\.,])", "\\1 \\2 ", norm)
    norm = re.sub(r"([\.,])([^0-9])", " \\1 \\2", norm)
    norm = re.sub(r"([0-9])(-)", "\\1 \\2 ", norm)
    norm = re.sub(r"\s+", " ", norm)
    return norm.strip()


def _extract_ngrams(line: str, max_order: int = 4) -> Counter:
    ngrams = Counter()
    tokens = line.split()
    for n in range(1, max_order + 1):
        for i in range(0, len(tokens) - n + 1):
            ngrams[" ".join(tokens[i : i + n])] += 1
    return ngrams


def _floored_log(value: float) -> float:
    if value == 0.0:
        return _ORACLE_LOG_FLOOR
    return math.log(value)


def oracle_bleu(refs: list[str], hyps: list[str], smooth: str = "exp") -> float:
    """Corpus BLEU per the reference toolkit's default signature.

    13a tokens, clipped n-gram precisions aggregated over the corpus,
    exponential smoothing for zero counts, brevity penalty from total
    lengths. Returns the 100-scaled score.
    """
    max_order = 4
    correct = [0] * max_order
    total = [0] * max_order
    sys_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_tok = oracle_tokenize_13a(hyp)
        ref_tok = oracle_tokenize_13a(ref)
        sys_len += len(hyp_tok.split())
        ref_len += len(ref_tok.split())
        ref_ngrams = _extract_ngrams(ref_tok)
        sys_ngrams = _extract_ngrams(hyp_tok)
        for ngram, count in sys_ngrams.items():
            n = len(ngram.split())
            correct[n - 1] += min(count, ref_ngrams.get(ngram, 0))
            total[n - 1] += count

    precisions = [0.0] * max_order
    smooth_mteval = 1.0
    for n in range(1, max_order + 1):
        if total[n - 1] == 0:
            break
        if correct[n - 1] == 0:
            if smooth == "exp":
                smooth_mteval *= 2
                precisions[n - 1] = 100.0 / (smooth_mteval * total[n - 1])
        else:
            precisions[n - 1] = 100.0 * correct[n - 1] / total[n - 1]

    if sys_len < ref_len:
        brevity_penalty = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    else:
        brevity_penalty = 1.0
    return brevity_penalty * math.exp(
        sum(map(_floored_log, precisions)) / max_order
    )


def _separate_word_punctuation(line: str) -> list[str]:
    words = []
    for w in line.split():
        if len(w) == 1:
            words.append(w)
        else:
            if w[-1] in punctuation:
                words += [w[:-1], w[-1]]
            elif w[0] in punctuation:
                words += [w[0], w[1:]]
            else:
                words.append(w)
    return words


def _counts_by_order(items: list, max_order: int) -> dict:
    counters = defaultdict(Counter)
    for n in range(1, max_order + 1):
        for i in range(len(items) - n + 1):
            counters[n][tuple(items[i : i + n])] += 1
    return counters


def oracle_chrf_pp(
    refs: list[str],
    hyps: list[str],
    ncorder: int = 6,
    nworder: int = 2,
    beta: float = 2.0,
) -> float:
    """chrF++ per the metric's published scoring flow, with eps smoothing.

    Character n-grams over whitespace-stripped text, word n-grams over
    edge-punctuation-separated words; per-order F from corpus totals,
    arithmetic mean over all orders, scaled to [0, 100].
    """
    eps = 1e-16
    hyp_counts = defaultdict(int)
    ref_counts = defaultdict(int)
    match_counts = defaultdict(int)
    for hyp, ref in zip(hyps, refs):
        hyp_chars = list(hyp.replace(" ", "").replace("\t", "").replace("\n", ""))
        ref_chars = list(ref.replace(" ", "").replace("\t", "").replace("\n", ""))
        hyp_by_order = _counts_by_order(hyp_chars, ncorder)
        ref_by_order = _counts_by_order(ref_chars, ncorder)
        for n in range(1, ncorder + 1):
            key = ("char", n)
            hyp_counts[key] += sum(hyp_by_order[n].values())
            ref_counts[key] += sum(ref_by_order[n].values())
            match_counts[key] += sum((hyp_by_order[n] & ref_by_order[n]).values())
        hyp_words = _separate_word_punctuation(hyp)
        ref_words = _separate_word_punctuation(ref)
        hyp_by_order = _counts_by_order(hyp_words, nworder)
        ref_by_order = _counts_by_order(ref_words, nworder)
        for n in range(1, nworder + 1):
            key = ("word", n)
            hyp_counts[key] += sum(hyp_by_order[n].values())
            ref_counts[key] += sum(ref_by_order[n].values())
            match_counts[key] += sum((hyp_by_order[n] & ref_by_order[n]).values())

    factor = beta ** 2
    score = 0.0
    n_orders = 0
    for kind in ("char", "word"):
        max_order = ncorder if kind == "char" else nworder
        for n in range(1, max_order + 1):
            key = (kind, n)
            prec = match_counts[key] / hyp_counts[key] if hyp_counts[key] > 0 else eps
            rec = match_counts[key] / ref_counts[key] if ref_counts[key] > 0 else eps
            denom = factor * prec + rec
            score += ((1 + factor) * prec * rec / denom) if denom > 0 else eps
            n_orders += 1
    return 100.0 * score / n_orders


def oracle_edit_distance(ref_tokens: list[str], hyp_tokens: list[str]) -> int:
    """Plain dynamic-programming edit distance, no backtrace."""
    prev = list(range(len(hyp_tokens) + 1))
    for i, rtok in enumerate(ref_tokens, start=1):
        cur = [i] + [0] * len(hyp_tokens)
        for j, htok in enumerate(hyp_tokens, start=1):
            cur[j] = min(
                prev[j - 1] + (0 if rtok == htok else 1),
                prev[j] + 1,
                cur[j - 1] + 1,
            )
        prev = cur
    return prev[-1]


def oracle_wer(refs: list[str], hyps: list[str]) -> float:
    """Corpus WER over lowercased, punctuation-stripped whitespace tokens."""
    total_edits = 0
    total_len = 0
    for ref, hyp in zip(refs, hyps):
        ref_tokens = _wer_normalize(ref)
        hyp_tokens = _wer_normalize(hyp)
        total_edits += oracle_edit_distance(ref_tokens, hyp_tokens)
        total_len += len(ref_tokens)
    return total_edits / total_len


def _wer_normalize(text: str) -> list[str]:
    out = []
    for ch in text.lower():
        if ch.isalnum() or ch.isspace():
            out.append(ch)
    return "".join(out).split()
