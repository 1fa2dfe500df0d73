"""Leave-one-out segment benefit and pairwise favoritism of a corpus metric.

The benefit of segment ``i`` is ``M(full) - M(without i)``. Favoritism toward
system S over system U is ``benefit_S(i) - benefit_U(i)``. Benefits are on
the 0-1 scale (corpus scores divided by 100).

Leave-one-out scores are computed by subtracting the segment's retained
counts from the corpus totals, so each benefit costs O(|segment|) rather
than a full rescoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Generic, Literal, Sequence, TypeVar

from macroeval.metrics import (
    DEFAULT_CONFIG,
    METRICS,
    ScoreConfig,
    bleu_counts,
    bleu_value,
    chrf_stats,
    chrf_value,
    class_f,
    macro_f_value,
    micro_f_value,
    sum_counts,
    sum_stats,
)
from macroeval.typestats import CorpusCounts, count_corpus, subtract

Favored = Literal["S", "U", "neither"]
T = TypeVar("T")


class LeaveOneOutScorer:
    """Corpus score with and without each segment, on the 0-100 scale."""

    full: float

    def __len__(self) -> int:
        raise NotImplementedError

    def without(self, i: int) -> float:
        raise NotImplementedError

    def _check_index(self, i: int) -> None:
        m = len(self)
        if m < 2:
            raise ValueError("leave-one-out needs at least 2 segments")
        if not 0 <= i < m:
            raise IndexError(f"segment index {i} out of range for {m} segments")

    def benefit(self, i: int) -> float:
        return (self.full - self.without(i)) / 100


class TypeLeaveOneOut(LeaveOneOutScorer):
    """MacroF / MicroF leave-one-out from per-type counts.

    Only the types present in the removed segment change their F value, so
    the corpus sums are patched for those types alone.
    """

    def __init__(self, corpus: CorpusCounts, micro: bool, beta: float = 1.0, k: float = 1.0):
        self.corpus = corpus
        self.micro = micro
        self.beta = beta
        self.k = k
        self._f = {c: class_f(s, beta)[2] for c, s in corpus.per_type.items()}
        if micro:
            self.full = micro_f_value(corpus.per_type, beta, k)
            self._num = math.fsum((s.refs + k) * self._f[c] for c, s in corpus.per_type.items())
            self._denom = math.fsum(s.refs + k for s in corpus.per_type.values())
        else:
            self.full = macro_f_value(corpus.per_type, beta)
            self._num = math.fsum(self._f.values())
            self._denom = len(self._f)

    def __len__(self) -> int:
        return len(self.corpus.segments)

    def without(self, i: int) -> float:
        self._check_index(i)
        per_type = self.corpus.per_type
        num = [self._num]
        denom = [self._denom]
        for c, part in self.corpus.segments[i].per_type.items():
            total = per_type[c]
            rest = subtract(total, part)
            weight = total.refs + self.k if self.micro else 1
            num.append(-weight * self._f[c])
            denom.append(-weight)
            if rest != (0, 0, 0):
                weight = rest.refs + self.k if self.micro else 1
                num.append(weight * class_f(rest, self.beta)[2])
                denom.append(weight)
        d = math.fsum(denom)
        if d <= 0:
            raise ValueError("empty vocabulary after leaving out segment")
        return 100 * math.fsum(num) / d


class StatsLeaveOneOut(LeaveOneOutScorer, Generic[T]):
    """Leave-one-out for metrics built from additive per-segment statistics."""

    def __init__(
        self,
        stats: Sequence[T],
        total: T,
        value: Callable[[T], float],
        minus: Callable[[T, T], T],
    ):
        self.stats = stats
        self.total = total
        self.value = value
        self.minus = minus
        self.full = value(total)

    def __len__(self) -> int:
        return len(self.stats)

    def without(self, i: int) -> float:
        self._check_index(i)
        return self.value(self.minus(self.total, self.stats[i]))


def _tuple_minus(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def leave_one_out(
    metric: str,
    hyp_lines: Sequence[str],
    ref_lines: Sequence[str],
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> LeaveOneOutScorer:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if len(hyp_lines) != len(ref_lines):
        raise ValueError(
            f"hypothesis has {len(hyp_lines)} segments, reference has {len(ref_lines)}"
        )
    if len(hyp_lines) < 2:
        raise ValueError("leave-one-out needs at least 2 segments")
    hyp_lines = config.preprocess(hyp_lines)
    ref_lines = config.preprocess(ref_lines)
    if metric == "chrf":
        stats = chrf_stats(hyp_lines, ref_lines)
        return StatsLeaveOneOut(
            stats, sum_stats(stats), lambda s: chrf_value(s, beta), _tuple_minus
        )
    hyps = config.tokenize(hyp_lines)
    refs = config.tokenize(ref_lines)
    if metric == "bleu":
        counts = bleu_counts(hyps, refs)
        return StatsLeaveOneOut(counts, sum_counts(counts), bleu_value, lambda a, b: a - b)
    return TypeLeaveOneOut(count_corpus(hyps, refs), metric == "microf", beta, k)


def benefit(scorer: LeaveOneOutScorer, i: int) -> float:
    return scorer.benefit(i)


@dataclass(frozen=True)
class FavoritismRecord:
    segment_index: int
    delta_s: float
    delta_u: float
    favoritism: float
    favored: Favored
    ref: str | None = None
    hyp_s: str | None = None
    hyp_u: str | None = None


def _favored(value: float) -> Favored:
    if value > 0:
        return "S"
    if value < 0:
        return "U"
    return "neither"


def _record(scorer_s: LeaveOneOutScorer, scorer_u: LeaveOneOutScorer, i: int) -> FavoritismRecord:
    delta_s = scorer_s.benefit(i)
    delta_u = scorer_u.benefit(i)
    fav = delta_s - delta_u
    return FavoritismRecord(i, delta_s, delta_u, fav, _favored(fav))


def _scorers(metric, refs, hyps_s, hyps_u, beta, k, config):
    if not len(refs) == len(hyps_s) == len(hyps_u):
        raise ValueError(
            f"segment counts differ: refs={len(refs)}, S={len(hyps_s)}, U={len(hyps_u)}"
        )
    return (
        leave_one_out(metric, hyps_s, refs, beta, k, config),
        leave_one_out(metric, hyps_u, refs, beta, k, config),
    )


def favoritism(
    metric: str,
    refs: Sequence[str],
    hyps_s: Sequence[str],
    hyps_u: Sequence[str],
    i: int,
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> FavoritismRecord:
    scorer_s, scorer_u = _scorers(metric, refs, hyps_s, hyps_u, beta, k, config)
    return _record(scorer_s, scorer_u, i)


def favoritism_records(
    metric: str,
    refs: Sequence[str],
    hyps_s: Sequence[str],
    hyps_u: Sequence[str],
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> list[FavoritismRecord]:
    """One record per segment, in segment order."""
    scorer_s, scorer_u = _scorers(metric, refs, hyps_s, hyps_u, beta, k, config)
    return [_record(scorer_s, scorer_u, i) for i in range(len(refs))]


def rank_favoritism(
    metric: str,
    refs: Sequence[str],
    hyps_s: Sequence[str],
    hyps_u: Sequence[str],
    top_k: int = 10,
    beta: float = 1.0,
    k: float = 1.0,
    config: ScoreConfig = DEFAULT_CONFIG,
) -> list[FavoritismRecord]:
    """Segments with the largest |favoritism| first, with their texts attached.

    Ties keep ascending segment order.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    records = favoritism_records(metric, refs, hyps_s, hyps_u, beta, k, config)
    records.sort(key=lambda r: (-abs(r.favoritism), r.segment_index))
    return [
        FavoritismRecord(
            r.segment_index,
            r.delta_s,
            r.delta_u,
            r.favoritism,
            r.favored,
            refs[r.segment_index],
            hyps_s[r.segment_index],
            hyps_u[r.segment_index],
        )
        for r in records[:top_k]
    ]
