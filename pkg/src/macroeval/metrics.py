"""Corpus-level scores: MacroF, MicroF, BLEU and chrF.

All values are reported on the 0-100 scale. Floating-point reductions go
through :func:`math.fsum` so the result does not depend on segment order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from macroeval import __version__
from macroeval.tokenizers import (
    DEFAULT_TOKENIZER,
    TokenizedSegment,
    get_tokenizer,
    remove_whitespace,
)
from macroeval.typestats import ClassStats, CorpusCounts, count_corpus

METRICS = ("macrof", "microf", "bleu", "chrf")
DISPLAY_NAMES = {"macrof": "MacroF", "microf": "MicroF", "bleu": "BLEU", "chrf": "chrF"}

BLEU_ORDER = 4
CHRF_ORDER = 6


@dataclass(frozen=True)
class ScoreConfig:
    """Preprocessing and metadata that go into every signature."""

    tokenizer: str = DEFAULT_TOKENIZER
    lowercase: bool = False
    lang_pair: str = "xx-yy"

    def preprocess(self, lines: Iterable[str]) -> list[str]:
        return [line.lower() for line in lines] if self.lowercase else list(lines)

    def tokenize(self, lines: Iterable[str]) -> list[TokenizedSegment]:
        tok = get_tokenizer(self.tokenizer)
        return [tok(line) for line in lines]


DEFAULT_CONFIG = ScoreConfig()


@dataclass(frozen=True)
class MetricScore:
    name: str
    value: float
    signature: str
    beta: float | None = None
    k: float | None = None

    def format(self, decimals: int = 3) -> str:
        return f"{self.value:.{decimals}f}"


@dataclass(frozen=True)
class ClassScore:
    type_key: str
    stats: ClassStats
    precision: float
    recall: float
    f_beta: float

    @property
    def refs_weight(self) -> int:
        return self.stats.refs


def signature(
    name: str,
    config: ScoreConfig = DEFAULT_CONFIG,
    beta: float | None = None,
    k: float | None = None,
) -> str:
    label = DISPLAY_NAMES[name] + (f"{beta:g}" if beta is not None else "")
    tok = "none" if name == "chrf" else config.tokenizer
    parts = [label, f"lang.{config.lang_pair}", "numrefs.1", f"tok.{tok}"]
    if k is not None:
        parts.append(f"k.{k:g}")
    parts.append("case.lc" if config.lowercase else "case.mixed")
    parts.append(f"v.{__version__}")
    return "+".join(parts)


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")


def class_f(stats: ClassStats, beta: float) -> tuple[float, float, float]:
    """(precision, recall, F_beta) of one type; all zero without a match."""
    preds, refs, match = stats
    if match == 0:
        return 0.0, 0.0, 0.0
    p = match / preds
    r = match / refs
    b2 = beta * beta
    return p, r, (1 + b2) * p * r / (b2 * p + r)


def class_scores(corpus: CorpusCounts, beta: float = 1.0) -> list[ClassScore]:
    _check_beta(beta)
    return [
        ClassScore(c, stats, *class_f(stats, beta))
        for c, stats in sorted(corpus.per_type.items())
    ]


def macro_f_value(per_type: dict[str, ClassStats], beta: float = 1.0) -> float:
    if not per_type:
        raise ValueError("empty vocabulary: hypothesis and reference are both empty")
    return 100 * math.fsum(class_f(s, beta)[2] for s in per_type.values()) / len(per_type)


def micro_f_value(per_type: dict[str, ClassStats], beta: float = 1.0, k: float = 1.0) -> float:
    if not per_type:
        raise ValueError("empty vocabulary: hypothesis and reference are both empty")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    weights = [s.refs + k for s in per_type.values()]
    denom = math.fsum(weights)
    if denom <= 0:
        raise ValueError("micro-average weights sum to zero")
    num = math.fsum(w * class_f(s, beta)[2] for w, s in zip(weights, per_type.values()))
    return 100 * num / denom


def macro_f(
    corpus: CorpusCounts, beta: float = 1.0, config: ScoreConfig = DEFAULT_CONFIG
) -> MetricScore:
    _check_beta(beta)
    return MetricScore(
        "macrof", macro_f_value(corpus.per_type, beta), signature("macrof", config, beta), beta
    )


def micro_f(
    corpus: CorpusCounts,
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> MetricScore:
    _check_beta(beta)
    return MetricScore(
        "microf",
        micro_f_value(corpus.per_type, beta, k),
        signature("microf", config, beta, k),
        beta,
        k,
    )


def per_type_report(
    corpus: CorpusCounts,
    beta: float = 1.0,
    sort: Literal["freq", "f"] = "freq",
    top: int = 500,
) -> list[ClassScore]:
    if top < 1:
        raise ValueError(f"top must be >= 1, got {top}")
    scores = class_scores(corpus, beta)
    if sort == "freq":
        scores.sort(key=lambda s: (-s.stats.refs, s.type_key))
    elif sort == "f":
        scores.sort(key=lambda s: (-s.f_beta, s.type_key))
    else:
        raise ValueError(f"unknown sort order {sort!r}")
    return scores[:top]


# BLEU


@dataclass(frozen=True)
class NgramCounts:
    """Additive BLEU sufficient statistics, orders 1..4."""

    matches: tuple[int, ...]
    totals: tuple[int, ...]
    hyp_len: int
    ref_len: int

    def __add__(self, other: NgramCounts) -> NgramCounts:
        return NgramCounts(
            tuple(a + b for a, b in zip(self.matches, other.matches)),
            tuple(a + b for a, b in zip(self.totals, other.totals)),
            self.hyp_len + other.hyp_len,
            self.ref_len + other.ref_len,
        )

    def __sub__(self, other: NgramCounts) -> NgramCounts:
        return NgramCounts(
            tuple(a - b for a, b in zip(self.matches, other.matches)),
            tuple(a - b for a, b in zip(self.totals, other.totals)),
            self.hyp_len - other.hyp_len,
            self.ref_len - other.ref_len,
        )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    if n == 1:
        return Counter(tokens)
    return Counter(zip(*(tokens[i:] for i in range(n))))


def bleu_segment_counts(hyp: Sequence[str], ref: Sequence[str]) -> NgramCounts:
    matches, totals = [], []
    for n in range(1, BLEU_ORDER + 1):
        hyp_ngrams = _ngrams(hyp, n)
        ref_ngrams = _ngrams(ref, n)
        matches.append(sum((hyp_ngrams & ref_ngrams).values()))
        totals.append(max(0, len(hyp) - n + 1))
    return NgramCounts(tuple(matches), tuple(totals), len(hyp), len(ref))


def bleu_counts(
    hyps: Sequence[TokenizedSegment], refs: Sequence[TokenizedSegment]
) -> list[NgramCounts]:
    _check_aligned(hyps, refs)
    return [bleu_segment_counts(h.tokens, r.tokens) for h, r in zip(hyps, refs)]


def sum_counts(counts: Sequence[NgramCounts]) -> NgramCounts:
    matches = [0] * BLEU_ORDER
    totals = [0] * BLEU_ORDER
    hyp_len = ref_len = 0
    for c in counts:
        for n in range(BLEU_ORDER):
            matches[n] += c.matches[n]
            totals[n] += c.totals[n]
        hyp_len += c.hyp_len
        ref_len += c.ref_len
    return NgramCounts(tuple(matches), tuple(totals), hyp_len, ref_len)


def bleu_value(counts: NgramCounts) -> float:
    """Corpus BLEU with exponential smoothing from summed n-gram statistics.

    Orders with no hypothesis n-grams are left out of the geometric mean.
    """
    if counts.hyp_len == 0:
        return 0.0
    smooth = 1.0
    log_sum = 0.0
    orders = 0
    for match, total in zip(counts.matches, counts.totals):
        if total == 0:
            continue
        if match == 0:
            smooth *= 2
            p = 1.0 / (smooth * total)
        else:
            p = match / total
        log_sum += math.log(p)
        orders += 1
    if counts.hyp_len < counts.ref_len:
        bp = math.exp(1 - counts.ref_len / counts.hyp_len)
    else:
        bp = 1.0
    return 100 * bp * math.exp(log_sum / orders)


def bleu(
    hyps: Sequence[TokenizedSegment],
    refs: Sequence[TokenizedSegment],
    config: ScoreConfig = DEFAULT_CONFIG,
) -> MetricScore:
    if not hyps:
        raise ValueError("empty corpus")
    value = bleu_value(sum_counts(bleu_counts(hyps, refs)))
    return MetricScore("bleu", value, signature("bleu", config))


# chrF

ChrfStats = tuple[int, ...]
"""Flat (hyp_total, ref_total, match) triples for orders 1..6."""


def chrf_segment_stats(hyp: str, ref: str) -> ChrfStats:
    hyp = remove_whitespace(hyp)
    ref = remove_whitespace(ref)
    stats = []
    for n in range(1, CHRF_ORDER + 1):
        hyp_ngrams = Counter(hyp[i : i + n] for i in range(len(hyp) - n + 1))
        ref_ngrams = Counter(ref[i : i + n] for i in range(len(ref) - n + 1))
        stats.append(max(0, len(hyp) - n + 1))
        stats.append(max(0, len(ref) - n + 1))
        stats.append(sum((hyp_ngrams & ref_ngrams).values()))
    return tuple(stats)


def chrf_stats(hyps: Sequence[str], refs: Sequence[str]) -> list[ChrfStats]:
    _check_aligned(hyps, refs)
    return [chrf_segment_stats(h, r) for h, r in zip(hyps, refs)]


def sum_stats(stats: Iterable[Sequence[int]]) -> tuple[int, ...]:
    return tuple(map(sum, zip(*stats)))


def chrf_value(stats: Sequence[int], beta: float = 1.0) -> float:
    precision = recall = 0.0
    orders = 0
    for n in range(CHRF_ORDER):
        hyp_total, ref_total, match = stats[3 * n : 3 * n + 3]
        if hyp_total > 0 and ref_total > 0:
            precision += match / hyp_total
            recall += match / ref_total
            orders += 1
    if orders == 0:
        return 0.0
    precision /= orders
    recall /= orders
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return 100 * (1 + b2) * precision * recall / denom


def chrf(
    hyps: Sequence[str],
    refs: Sequence[str],
    beta: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> MetricScore:
    _check_beta(beta)
    if not hyps:
        raise ValueError("empty corpus")
    value = chrf_value(sum_stats(chrf_stats(hyps, refs)), beta)
    return MetricScore("chrf", value, signature("chrf", config, beta), beta)


def _check_aligned(hyps: Sequence, refs: Sequence) -> None:
    if len(hyps) != len(refs):
        raise ValueError(f"hypothesis has {len(hyps)} segments, reference has {len(refs)}")


def score_corpus(
    hyp_lines: Sequence[str],
    ref_lines: Sequence[str],
    metrics: Sequence[str] = ("macrof", "microf"),
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> list[MetricScore]:
    """Score raw hypothesis lines against raw reference lines.

    Lines are lowercased (if configured) and tokenized once, then shared by
    every requested metric.
    """
    _check_aligned(hyp_lines, ref_lines)
    unknown = [m for m in metrics if m not in METRICS]
    if unknown:
        raise ValueError(f"unknown metric(s): {', '.join(unknown)}")
    hyp_lines = config.preprocess(hyp_lines)
    ref_lines = config.preprocess(ref_lines)
    hyps = refs = None
    corpus = None
    if any(m != "chrf" for m in metrics):
        hyps = config.tokenize(hyp_lines)
        refs = config.tokenize(ref_lines)
    scores = []
    for name in metrics:
        if name in ("macrof", "microf") and corpus is None:
            corpus = count_corpus(hyps, refs)
        if name == "macrof":
            scores.append(macro_f(corpus, beta, config))
        elif name == "microf":
            scores.append(micro_f(corpus, beta, k, config))
        elif name == "bleu":
            scores.append(bleu(hyps, refs, config))
        else:
            scores.append(chrf(hyp_lines, ref_lines, beta, config))
    return scores
