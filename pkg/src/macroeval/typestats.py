"""Per-type (preds, refs, match) counts at segment and corpus level."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import chain
from typing import NamedTuple, Sequence

from macroeval.tokenizers import TokenizedSegment


class ClassStats(NamedTuple):
    preds: int
    refs: int
    match: int


@dataclass(frozen=True)
class SegmentCounts:
    """Token multisets of one aligned segment pair."""

    hyp_counts: Counter
    ref_counts: Counter
    hyp_len: int
    ref_len: int

    @cached_property
    def per_type(self) -> dict[str, ClassStats]:
        return _per_type(self.hyp_counts, self.ref_counts, self._matches())

    def _matches(self) -> dict[str, int]:
        hyp, ref = self.hyp_counts, self.ref_counts
        return {c: min(hyp[c], ref[c]) for c in hyp.keys() & ref.keys()}


def _per_type(preds: Counter, refs: Counter, matches: dict[str, int]) -> dict[str, ClassStats]:
    make = tuple.__new__
    get_ref, get_match = refs.get, matches.get
    per_type = {c: make(ClassStats, (p, get_ref(c, 0), get_match(c, 0))) for c, p in preds.items()}
    for c, r in refs.items():
        if c not in per_type:
            per_type[c] = make(ClassStats, (0, r, 0))
    return per_type


@dataclass(frozen=True)
class CorpusCounts:
    per_type: dict[str, ClassStats]
    segments: tuple[SegmentCounts, ...]
    total_hyp_len: int
    total_ref_len: int

    @property
    def vocab_size(self) -> int:
        return len(self.per_type)

    def __len__(self) -> int:
        return len(self.segments)


def _tokens(seg: TokenizedSegment | Sequence[str]) -> Sequence[str]:
    return seg.tokens if isinstance(seg, TokenizedSegment) else seg


def count_segment(
    hyp: TokenizedSegment | Sequence[str], ref: TokenizedSegment | Sequence[str]
) -> SegmentCounts:
    hyp_tokens, ref_tokens = _tokens(hyp), _tokens(ref)
    return SegmentCounts(Counter(hyp_tokens), Counter(ref_tokens), len(hyp_tokens), len(ref_tokens))


def aggregate(segments: Sequence[SegmentCounts]) -> CorpusCounts:
    if not segments:
        raise ValueError("empty corpus")
    segments = tuple(segments)
    preds = Counter(chain.from_iterable(s.hyp_counts.elements() for s in segments))
    refs = Counter(chain.from_iterable(s.ref_counts.elements() for s in segments))
    matches: Counter = Counter()
    for seg in segments:
        hyp, ref = seg.hyp_counts, seg.ref_counts
        for c in hyp.keys() & ref.keys():
            a, b = hyp[c], ref[c]
            matches[c] += a if a < b else b
    return CorpusCounts(
        per_type=_per_type(preds, refs, matches),
        segments=segments,
        total_hyp_len=sum(s.hyp_len for s in segments),
        total_ref_len=sum(s.ref_len for s in segments),
    )


def count_corpus(
    hyps: Sequence[TokenizedSegment | Sequence[str]],
    refs: Sequence[TokenizedSegment | Sequence[str]],
) -> CorpusCounts:
    if len(hyps) != len(refs):
        raise ValueError(f"hypothesis has {len(hyps)} segments, reference has {len(refs)}")
    return aggregate([count_segment(h, r) for h, r in zip(hyps, refs)])


def subtract(total: ClassStats, part: ClassStats) -> ClassStats:
    return ClassStats(total.preds - part.preds, total.refs - part.refs, total.match - part.match)


def remove_segment(corpus: CorpusCounts, i: int) -> CorpusCounts:
    """Counts of ``corpus`` with segment ``i`` left out.

    Subtracts the retained per-segment counts instead of re-aggregating, and
    drops any type whose triple falls to (0, 0, 0).
    """
    m = len(corpus.segments)
    if m < 2:
        raise ValueError("leave-one-out needs at least 2 segments")
    if not 0 <= i < m:
        raise IndexError(f"segment index {i} out of range for {m} segments")
    removed = corpus.segments[i]
    per_type = dict(corpus.per_type)
    for c, part in removed.per_type.items():
        rest = subtract(per_type[c], part)
        if rest == (0, 0, 0):
            del per_type[c]
        else:
            per_type[c] = rest
    return CorpusCounts(
        per_type=per_type,
        segments=corpus.segments[:i] + corpus.segments[i + 1 :],
        total_hyp_len=corpus.total_hyp_len - removed.hyp_len,
        total_ref_len=corpus.total_ref_len - removed.ref_len,
    )
