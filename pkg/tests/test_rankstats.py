import itertools
from collections import Counter
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from macroeval.rankstats import (
    CorrelationResult,
    DegenerateCorrelationError,
    MetricTable,
    TableFormatError,
    TableRow,
    aggregate,
    concordance_variance,
    correlate_table,
    exact_p_value,
    kendall_tau_b,
    read_table_row,
)
from oracles import exact_p_by_permutations, tau_by_enumeration

distinct_vectors = st.integers(2, 10).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(-1000, 1000), min_size=n, max_size=n, unique=True),
        st.lists(st.integers(-1000, 1000), min_size=n, max_size=n, unique=True),
    )
)
tied_vectors = st.integers(3, 12).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
    )
).filter(lambda xy: len(set(xy[0])) > 1 and len(set(xy[1])) > 1)


def test_perfect_and_reversed():
    assert kendall_tau_b([1, 2, 3, 4, 5], [1, 2, 3, 4, 5]).tau == 1.0
    assert kendall_tau_b([1, 2, 3], [3, 2, 1]).tau == -1.0


def test_one_swap_of_four():
    result = kendall_tau_b([1, 2, 3, 4], [1, 3, 2, 4])
    assert result.tau == pytest.approx(4 / 6, rel=1e-15)
    # Enumerating all 24 orderings: 8 are at least as extreme in either direction.
    assert exact_p_by_permutations([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(8 / 24)
    assert result.p_value == pytest.approx(8 / 24, rel=1e-15)
    assert not result.significant


def test_perfect_agreement_n5_significant():
    result = kendall_tau_b(range(5), range(5))
    assert result.p_value == pytest.approx(2 / 120, rel=1e-15)
    assert result.significant
    assert not kendall_tau_b(range(4), range(4)).significant


def test_matches_scipy():
    stats = pytest.importorskip("scipy.stats")
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(3, 15)
        x = [rng.randint(0, 6) for _ in range(n)]
        y = [rng.randint(0, 6) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        ours = kendall_tau_b(x, y)
        ties = len(set(x)) < n or len(set(y)) < n
        if not ties and n <= 8:
            theirs = stats.kendalltau(x, y, variant="b", method="exact")
            assert ours.p_value == pytest.approx(theirs.pvalue, abs=1e-12)
        else:
            # scipy's asymptotic test has no continuity correction; recover its
            # tie-corrected variance from z and compare ours against it.
            theirs = stats.kendalltau(x, y, variant="b", method="asymptotic")
            s = ours.tau * math.sqrt(
                (n * (n - 1) / 2 - _tied_pairs(x)) * (n * (n - 1) / 2 - _tied_pairs(y))
            )
            if 1e-9 < theirs.pvalue < 1 - 1e-9:
                z = stats.norm.isf(theirs.pvalue / 2)
                assert concordance_variance(n, x, y) == pytest.approx((s / z) ** 2, rel=1e-6)
        assert ours.tau == pytest.approx(theirs.statistic, abs=1e-12)


def _tied_pairs(v):
    return sum(c * (c - 1) // 2 for c in Counter(v).values())


@pytest.mark.parametrize("n", range(2, 7))
def test_tau_equals_enumeration_all_permutations(n):
    x = list(range(n))
    for perm in itertools.permutations(range(n)):
        assert kendall_tau_b(x, list(perm)).tau == tau_by_enumeration(x, perm)


@pytest.mark.parametrize("n", range(2, 7))
def test_exact_p_equals_permutation_count(n):
    x = list(range(n))
    for perm in itertools.permutations(range(n)):
        assert kendall_tau_b(x, list(perm)).p_value == pytest.approx(
            exact_p_by_permutations(x, list(perm)), rel=1e-12
        )


def test_exact_p_at_tau_zero_is_one():
    assert exact_p_value(4, 3) == 1.0


def test_degenerate():
    with pytest.raises(DegenerateCorrelationError, match="undefined correlation"):
        kendall_tau_b([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateCorrelationError):
        kendall_tau_b([1], [1])
    with pytest.raises(ValueError):
        kendall_tau_b([1, 2], [1, 2, 3])


@given(distinct_vectors)
def test_antisymmetry(xy):
    x, y = xy
    assert kendall_tau_b(x, [-v for v in y]).tau == pytest.approx(-kendall_tau_b(x, y).tau, abs=1e-15)


@given(tied_vectors)
def test_antisymmetry_with_ties(xy):
    x, y = xy
    assert kendall_tau_b(x, [-v for v in y]).tau == pytest.approx(-kendall_tau_b(x, y).tau, abs=1e-15)


@given(distinct_vectors)
def test_monotone_transform_invariance(xy):
    x, y = xy
    base = kendall_tau_b(x, y)
    transformed = kendall_tau_b([v**3 + 7 * v - 4 for v in x], y)
    assert transformed.tau == base.tau


@given(tied_vectors)
def test_bounds(xy):
    r = kendall_tau_b(*xy)
    assert -1.0 <= r.tau <= 1.0
    assert 0.0 <= r.p_value <= 1.0
    assert r.significant == (r.p_value < 0.05)


def test_exact_and_normal_agree_roughly():
    from macroeval.rankstats import normal_p_value

    rng = random.Random(17)
    for _ in range(300):
        n = rng.randint(5, 8)
        x = list(range(n))
        y = rng.sample(range(n), n)
        r = kendall_tau_b(x, y)
        s = round(r.tau * n * (n - 1) / 2)
        assert abs(r.p_value - normal_p_value(n, s, x, y)) <= 0.05


# tables


def _row(setting, human, **metrics):
    return TableRow(setting, tuple(f"sys{i}" for i in range(len(human))), tuple(human), metrics)


def test_correlate_table_cells():
    human = (1, 2, 3, 4, 5)
    table = MetricTable(
        [_row("de-en", human, A=(1, 2, 3, 4, 5), B=(1, 2, 3, 4, 5), C=(2, 2, 2, 2, 2))]
    )
    cells = correlate_table(table)
    assert cells["de-en", "A"].tau == 1.0
    assert cells["de-en", "A"].significant
    assert cells["de-en", "A"] == cells["de-en", "B"]
    assert cells["de-en", "C"] is None


def _cell(tau, significant):
    return CorrelationResult(tau, 0.01 if significant else 0.5, 10, significant)


def test_aggregate_wins_and_ties():
    cells = {("r1", "A"): _cell(0.9, True), ("r1", "B"): _cell(0.8, True)}
    agg = aggregate(cells)
    assert (agg["A"].wins, agg["B"].wins) == (1, 0)
    cells = {("r1", "A"): _cell(0.9, True), ("r1", "B"): _cell(0.9, True)}
    agg = aggregate(cells)
    assert (agg["A"].wins, agg["B"].wins) == (1, 1)


def test_aggregate_excludes_insignificant():
    cells = {
        ("r1", "A"): _cell(0.8, True),
        ("r2", "A"): _cell(0.9, True),
        ("r3", "A"): _cell(0.1, False),
        ("r3", "B"): None,
    }
    agg = aggregate(cells)
    assert agg["A"].mean == pytest.approx(0.85)
    assert agg["A"].median == pytest.approx(0.85)
    assert agg["A"].sd == pytest.approx(0.05)
    assert agg["A"].n_significant == 2
    assert agg["A"].wins == 2
    assert agg["B"] == agg["B"].__class__(None, None, None, 0, 0)


def test_aggregate_rows_without_significance_award_nothing():
    cells = {("r1", "A"): _cell(0.2, False), ("r1", "B"): _cell(0.1, False)}
    agg = aggregate(cells)
    assert agg["A"].wins == agg["B"].wins == 0


def test_wins_cover_significant_rows():
    rng = random.Random(8)
    for _ in range(50):
        cells = {
            (f"r{i}", m): _cell(round(rng.random(), 1), rng.random() < 0.6)
            for i in range(5)
            for m in "ABC"
        }
        agg = aggregate(cells)
        rows_with_sig = len({s for (s, _), r in cells.items() if r.significant})
        assert sum(a.wins for a in agg.values()) >= rows_with_sig


def test_read_table_row(tmp_path):
    path = tmp_path / "de-en.tsv"
    path.write_text("system\thuman\tBLEU\tMacroF1\nA\t0.1\t20.5\t30\nB\t0.3\t22\t31\n", "utf-8")
    row = read_table_row(path)
    assert row.setting == "de-en"
    assert row.systems == ("A", "B")
    assert row.human == (0.1, 0.3)
    assert row.metrics == {"BLEU": (20.5, 22.0), "MacroF1": (30.0, 31.0)}


@pytest.mark.parametrize(
    "content, line",
    [
        ("sys\thuman\tBLEU\nA\t1\t2\n", 1),
        ("system\thuman\tBLEU\nA\t1\t2\nB\t1\n", 3),
        ("system\thuman\tBLEU\nA\t1\t2\nB\tx\t3\n", 3),
        ("", 1),
    ],
)
def test_read_table_row_malformed(tmp_path, content, line):
    path = tmp_path / "bad.tsv"
    path.write_text(content, "utf-8")
    with pytest.raises(TableFormatError) as info:
        read_table_row(path)
    assert info.value.line == line
