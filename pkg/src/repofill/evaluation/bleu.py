"""Sentence BLEU-4 over code tokens.

Precision for orders two and up is smoothed by adding one to both the match
count and the n-gram count (the "method 2" smoothing of Chen and Cherry, as
implemented by NLTK). Hypotheses shorter than four tokens are scored with
uniform weights over the orders they can contain, so identical short strings
still reach 100.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from ..tokens import code_tokens


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def clipped_precision(hyp: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int]:
    """(clipped matches, max(1, hypothesis n-grams))."""
    hyp_counts = ngram_counts(hyp, n)
    ref_counts = ngram_counts(ref, n)
    matches = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    return matches, max(1, sum(hyp_counts.values()))


def brevity_penalty(ref_len: int, hyp_len: int) -> float:
    if hyp_len > ref_len:
        return 1.0
    if hyp_len == 0:
        return 0.0
    return math.exp(1 - ref_len / hyp_len)


def uniform_weights(hyp_len: int, max_order: int = 4) -> tuple[float, ...]:
    order = max_order if hyp_len >= max_order else hyp_len
    return (1.0 / order,) * order


def bleu_tokens(hyp: Sequence[str], ref: Sequence[str], max_order: int = 4) -> float:
    """BLEU in [0, 1] for pre-tokenized input; two empty inputs count as identical."""
    if not hyp and not ref:
        return 1.0
    if not hyp or not ref:
        return 0.0
    weights = uniform_weights(len(hyp), max_order)
    counts = [clipped_precision(hyp, ref, n) for n in range(1, len(weights) + 1)]
    if counts[0][0] == 0:
        return 0.0
    log_sum = 0.0
    for n, (w, (num, den)) in enumerate(zip(weights, counts), 1):
        if n > 1:
            num, den = num + 1, den + 1
        log_sum += w * math.log(num / den)
    return brevity_penalty(len(ref), len(hyp)) * math.exp(log_sum)


def bleu(candidate: str, reference: str) -> float:
    """BLEU-4 of ``candidate`` against ``reference`` on a 0-100 scale."""
    return 100.0 * bleu_tokens(code_tokens(candidate), code_tokens(reference))
