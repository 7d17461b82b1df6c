"""Corpus evaluation metrics: BLEU-n, smoothed BLEU, ROUGE-1/2/L, simplified METEOR.

All scores are reals in [0, 100]. Tokenization is character-level for CJK
text and whitespace/word-level otherwise (see textutil.tokenize). METEOR is
exact-match only and reported as "meteor-simplified".
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .textutil import tokenize

REPORT_COLUMNS = (
    "sacrebleu",
    "rouge-1",
    "rouge-2",
    "rouge-l",
    "bleu-1",
    "bleu-4",
    "meteor-simplified",
)


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPair:
    candidate: tuple[str, ...]
    references: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.references:
            raise MetricsError("at least one reference required")


def make_pairs(candidates: list[str], references: list[str]) -> list[EvalPair]:
    if len(candidates) != len(references):
        raise MetricsError(
            f"candidate/reference count mismatch: {len(candidates)} vs {len(references)}"
        )
    return [
        EvalPair(tuple(tokenize(c)), (tuple(tokenize(r)),))
        for c, r in zip(candidates, references)
    ]


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(cand_len: int, refs) -> int:
    # ties break toward the shorter reference, as in standard BLEU
    return min((abs(len(r) - cand_len), len(r)) for r in refs)[1]


def _bleu_stats(pairs: list[EvalPair], max_n: int):
    matched = [0] * max_n
    total = [0] * max_n
    cand_len = 0
    ref_len = 0
    for pair in pairs:
        cand_len += len(pair.candidate)
        ref_len += _closest_ref_len(len(pair.candidate), pair.references)
        for n in range(1, max_n + 1):
            cand_counts = _ngrams(pair.candidate, n)
            max_ref = Counter()
            for ref in pair.references:
                for g, c in _ngrams(ref, n).items():
                    max_ref[g] = max(max_ref[g], c)
            matched[n - 1] += sum(min(c, max_ref[g]) for g, c in cand_counts.items())
            total[n - 1] += sum(cand_counts.values())
    return matched, total, cand_len, ref_len


def _brevity_penalty(cand_len: int, ref_len: int) -> float:
    if cand_len == 0:
        return 0.0
    if cand_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / cand_len)


def bleu_n(pairs: list[EvalPair], n: int) -> float:
    """Corpus BLEU up to order n (geometric mean of precisions, with BP), x100."""
    if n < 1:
        raise MetricsError("n must be >= 1")
    matched, total, cand_len, ref_len = _bleu_stats(pairs, n)
    if any(t == 0 or m == 0 for m, t in zip(matched, total)):
        return 0.0
    log_prec = sum(math.log(m / t) for m, t in zip(matched, total)) / n
    return 100.0 * _brevity_penalty(cand_len, ref_len) * math.exp(log_prec)


def sacrebleu_like(pairs: list[EvalPair]) -> float:
    """BLEU-4 with add-one smoothing on precisions of order >= 2, x100."""
    if not pairs:
        raise MetricsError("empty pair list")
    matched, total, cand_len, ref_len = _bleu_stats(pairs, 4)
    precisions = []
    for order, (m, t) in enumerate(zip(matched, total), start=1):
        if order == 1:
            if t == 0 or m == 0:
                return 0.0
            precisions.append(m / t)
        else:
            precisions.append((m + 1) / (t + 1))
    log_prec = sum(math.log(p) for p in precisions) / 4
    return 100.0 * _brevity_penalty(cand_len, ref_len) * math.exp(log_prec)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge_n(pairs: list[EvalPair], n: int) -> float:
    """Mean best-reference n-gram F1 over the corpus, x100."""
    if not pairs:
        raise MetricsError("empty pair list")
    scores = []
    for pair in pairs:
        cand_counts = _ngrams(pair.candidate, n)
        cand_total = sum(cand_counts.values())
        best = 0.0
        for ref in pair.references:
            ref_counts = _ngrams(ref, n)
            ref_total = sum(ref_counts.values())
            overlap = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
            p = overlap / cand_total if cand_total else 0.0
            r = overlap / ref_total if ref_total else 0.0
            best = max(best, _f1(p, r))
        scores.append(best)
    return 100.0 * sum(scores) / len(scores)


def _lcs_len(a, b) -> int:
    # O(len(a) * len(b)) dynamic program, single rolling row
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(pairs: list[EvalPair]) -> float:
    """Mean best-reference LCS F1 over the corpus, x100."""
    if not pairs:
        raise MetricsError("empty pair list")
    scores = []
    for pair in pairs:
        best = 0.0
        for ref in pair.references:
            lcs = _lcs_len(pair.candidate, ref)
            p = lcs / len(pair.candidate) if pair.candidate else 0.0
            r = lcs / len(ref) if ref else 0.0
            best = max(best, _f1(p, r))
        scores.append(best)
    return 100.0 * sum(scores) / len(scores)


def _meteor_alignment(cand, ref) -> list[tuple[int, int]]:
    """Greedy in-order exact alignment: each candidate token takes the earliest
    unused identical reference token."""
    used = [False] * len(ref)
    alignment = []
    for i, tok in enumerate(cand):
        for j, rtok in enumerate(ref):
            if not used[j] and rtok == tok:
                used[j] = True
                alignment.append((i, j))
                break
    return alignment


def _count_chunks(alignment: list[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for i, j in alignment:  # alignment is sorted by candidate index
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def _meteor_pair(cand, ref) -> float:
    alignment = _meteor_alignment(cand, ref)
    m = len(alignment)
    if m == 0 or not cand or not ref:
        return 0.0
    precision = m / len(cand)
    recall = m / len(ref)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (_count_chunks(alignment) / m) ** 3
    return fmean * (1.0 - penalty)


def meteor_simplified(pairs: list[EvalPair]) -> float:
    """Exact-match METEOR (no stemming or synonyms), best reference, x100."""
    if not pairs:
        raise MetricsError("empty pair list")
    scores = [
        max(_meteor_pair(pair.candidate, ref) for ref in pair.references)
        for pair in pairs
    ]
    return 100.0 * sum(scores) / len(scores)


def evaluate_suite(candidates: list[str], references: list[str]) -> dict[str, float]:
    """All report columns for line-aligned candidate and reference texts."""
    pairs = make_pairs(candidates, references)
    return {
        "sacrebleu": sacrebleu_like(pairs),
        "rouge-1": rouge_n(pairs, 1),
        "rouge-2": rouge_n(pairs, 2),
        "rouge-l": rouge_l(pairs),
        "bleu-1": bleu_n(pairs, 1),
        "bleu-4": bleu_n(pairs, 4),
        "meteor-simplified": meteor_simplified(pairs),
    }


def format_report(report: dict[str, float], delimiter: str = "\t") -> str:
    """Two-line delimited report: header row plus the score row."""
    header = delimiter.join(REPORT_COLUMNS)
    row = delimiter.join(f"{report[c]:.2f}" for c in REPORT_COLUMNS)
    return header + "\n" + row + "\n"
