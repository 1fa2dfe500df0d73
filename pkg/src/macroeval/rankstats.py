"""Kendall tau-b against human judgments, with significance-gated summaries."""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

DEFAULT_ALPHA = 0.05
# Largest tie-free sample size that gets an exact p-value.
EXACT_MAX_N = 8


class DegenerateCorrelationError(ValueError):
    pass


class TableFormatError(ValueError):
    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


@dataclass(frozen=True)
class CorrelationResult:
    tau: float
    p_value: float
    n: int
    significant: bool


@dataclass(frozen=True)
class TableRow:
    setting: str
    systems: tuple[str, ...]
    human: tuple[float, ...]
    metrics: dict[str, tuple[float, ...]]


@dataclass
class MetricTable:
    rows: list[TableRow]
    alpha: float = DEFAULT_ALPHA

    @property
    def metric_names(self) -> list[str]:
        names: dict[str, None] = {}
        for row in self.rows:
            names.update(dict.fromkeys(row.metrics))
        return list(names)


@dataclass(frozen=True)
class AggregateRow:
    mean: float | None
    median: float | None
    sd: float | None
    wins: int
    n_significant: int


@lru_cache(maxsize=None)
def _inversion_counts(n: int) -> tuple[int, ...]:
    # Number of permutations of n items with exactly d inversions (Mahonian numbers).
    counts = [1]
    for size in range(2, n + 1):
        new = [0] * (len(counts) + size - 1)
        for d, c in enumerate(counts):
            for extra in range(size):
                new[d + extra] += c
        counts = new
    return tuple(counts)


def exact_p_value(n: int, discordant: int) -> float:
    """Two-sided exact p-value of tau for ``n`` tie-free pairs of ranks."""
    counts = _inversion_counts(n)
    n_pairs = n * (n - 1) // 2
    tail = min(discordant, n_pairs - discordant)
    p = 2 * sum(counts[: tail + 1]) / math.factorial(n)
    return min(1.0, p)


def _tie_groups(values: Sequence[float]) -> list[int]:
    groups: dict[float, int] = {}
    for v in values:
        groups[v] = groups.get(v, 0) + 1
    return [t for t in groups.values() if t > 1]


def concordance_variance(n: int, x: Sequence[float], y: Sequence[float]) -> float:
    """Null variance of C - D, corrected for ties in either vector."""
    tx = _tie_groups(x)
    ty = _tie_groups(y)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in ty)
    var = (v0 - vt - vu) / 18
    var += (
        sum(t * (t - 1) * (t - 2) for t in tx)
        * sum(u * (u - 1) * (u - 2) for u in ty)
        / (9 * n * (n - 1) * (n - 2))
    )
    var += sum(t * (t - 1) for t in tx) * sum(u * (u - 1) for u in ty) / (2 * n * (n - 1))
    return var


def normal_p_value(n: int, s: int, x: Sequence[float], y: Sequence[float]) -> float:
    """Two-sided p-value of the concordance score ``s`` under a normal approximation.

    Uses the tie-corrected variance of ``s`` and a continuity correction of 1.
    """
    z = max(0, abs(s) - 1) / math.sqrt(concordance_variance(n, x, y))
    return min(1.0, math.erfc(z / math.sqrt(2)))


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def kendall_tau_b(
    x: Sequence[float], y: Sequence[float], alpha: float = DEFAULT_ALPHA
) -> CorrelationResult:
    """Kendall tau-b of two paired score vectors.

    The p-value is exact (two-sided, by enumeration of the null distribution)
    for ``n <= 8`` without ties, and a tie-corrected normal approximation
    otherwise.
    """
    n = len(x)
    if n != len(y):
        raise ValueError(f"vectors differ in length: {n} vs {len(y)}")
    if n < 2:
        raise DegenerateCorrelationError("undefined correlation: fewer than 2 observations")
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n - 1):
        xi, yi = x[i], y[i]
        for j in range(i + 1, n):
            dx = _sign(x[j] - xi)
            dy = _sign(y[j] - yi)
            if dx == 0:
                ties_x += 1
            if dy == 0:
                ties_y += 1
            if dx * dy > 0:
                concordant += 1
            elif dx * dy < 0:
                discordant += 1
    n_pairs = n * (n - 1) // 2
    if ties_x == n_pairs or ties_y == n_pairs:
        raise DegenerateCorrelationError("undefined correlation: constant vector")
    tau = (concordant - discordant) / math.sqrt((n_pairs - ties_x) * (n_pairs - ties_y))
    tau = max(-1.0, min(1.0, tau))
    if n <= EXACT_MAX_N and ties_x == 0 and ties_y == 0:
        p = exact_p_value(n, discordant)
    else:
        p = normal_p_value(n, concordant - discordant, x, y)
    return CorrelationResult(tau, p, n, p < alpha)


Cells = dict[tuple[str, str], "CorrelationResult | None"]


def correlate_table(table: MetricTable) -> Cells:
    """Correlate every metric column with the human column, row by row.

    Degenerate cells (constant vectors) are recorded as ``None``.
    """
    cells: Cells = {}
    for row in table.rows:
        for metric, scores in row.metrics.items():
            try:
                cells[row.setting, metric] = kendall_tau_b(scores, row.human, table.alpha)
            except DegenerateCorrelationError:
                cells[row.setting, metric] = None
    return cells


def aggregate(
    cells: Mapping[tuple[str, str], CorrelationResult | None],
    alpha: float = DEFAULT_ALPHA,
) -> dict[str, AggregateRow]:
    """Mean, median, population SD and wins over significant cells only."""
    settings = list(dict.fromkeys(s for s, _ in cells))
    metrics = list(dict.fromkeys(m for _, m in cells))
    significant: dict[tuple[str, str], float] = {
        key: r.tau for key, r in cells.items() if r is not None and r.p_value < alpha
    }
    wins = dict.fromkeys(metrics, 0)
    for setting in settings:
        row = {m: significant[setting, m] for m in metrics if (setting, m) in significant}
        if not row:
            continue
        best = max(row.values())
        for m, tau in row.items():
            if tau == best:
                wins[m] += 1
    result = {}
    for m in metrics:
        taus = [significant[s, m] for s in settings if (s, m) in significant]
        if taus:
            result[m] = AggregateRow(
                statistics.fmean(taus),
                statistics.median(taus),
                statistics.pstdev(taus),
                wins[m],
                len(taus),
            )
        else:
            result[m] = AggregateRow(None, None, None, wins[m], 0)
    return result


def _parse_float(text: str, path: Path, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TableFormatError(path, line, f"column {column!r}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise TableFormatError(path, line, f"column {column!r}: not finite: {text!r}")
    return value


def read_table_row(path: str | Path, setting: str | None = None) -> TableRow:
    """Read one setting from a TSV with header ``system, human, <metric>...``."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE))
    rows = [(lineno, r) for lineno, r in enumerate(rows, start=1) if r and any(r)]
    if not rows:
        raise TableFormatError(path, 1, "empty table")
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 3 or header[0] != "system" or header[1] != "human":
        raise TableFormatError(
            path, header_line, "header must be: system<TAB>human<TAB><metric>..."
        )
    metric_names = header[2:]
    if len(set(metric_names)) != len(metric_names):
        raise TableFormatError(path, header_line, "duplicate metric column")
    systems, human = [], []
    columns: dict[str, list[float]] = {m: [] for m in metric_names}
    for lineno, r in rows[1:]:
        if len(r) != len(header):
            raise TableFormatError(
                path, lineno, f"expected {len(header)} columns, found {len(r)}"
            )
        systems.append(r[0].strip())
        human.append(_parse_float(r[1].strip(), path, lineno, "human"))
        for m, cell in zip(metric_names, r[2:]):
            columns[m].append(_parse_float(cell.strip(), path, lineno, m))
    if len(systems) < 2:
        raise TableFormatError(path, header_line, "need at least 2 systems")
    return TableRow(
        setting or path.stem,
        tuple(systems),
        tuple(human),
        {m: tuple(v) for m, v in columns.items()},
    )


def read_table(paths: Sequence[str | Path], alpha: float = DEFAULT_ALPHA) -> MetricTable:
    return MetricTable([read_table_row(p) for p in paths], alpha)
