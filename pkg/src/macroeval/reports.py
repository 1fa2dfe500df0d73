"""Deterministic text / TSV / JSON rendering of command results."""

from __future__ import annotations

import json
import os
import sys
from typing import Any, Mapping, Sequence

from macroeval import __version__
from macroeval.favoritism import FavoritismRecord
from macroeval.metrics import ClassScore, MetricScore
from macroeval.rankstats import AggregateRow, CorrelationResult

NOT_SIGNIFICANT = "×"
MISSING = "n/a"


def color_enabled(stream=None) -> bool:
    stream = stream or sys.stdout
    if os.environ.get("MACROEVAL_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _bold(text: str, color: bool) -> str:
    return f"\033[1m{text}\033[0m" if color else text


def fmt_score(value: float) -> str:
    return f"{value:.3f}"


def fmt_delta(value: float) -> str:
    text = f"{value:.5f}"
    return "0.00000" if text == "-0.00000" else text


def _tsv_cell(text: str) -> str:
    return text.replace("\t", " ")


def _json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def _align(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() + "\n" for row in rows
    )


def render_scores(
    results: Sequence[tuple[str, Sequence[MetricScore]]],
    config: Mapping[str, Any],
    fmt: str,
    color: bool = False,
) -> str:
    if fmt == "json":
        return _json(
            {
                "tool_version": __version__,
                "config": dict(config),
                "scores": [
                    {
                        "hyp": hyp,
                        "metric": s.name,
                        "value": s.value,
                        "signature": s.signature,
                    }
                    for hyp, scores in results
                    for s in scores
                ],
            }
        )
    if fmt == "tsv":
        lines = ["hyp\tmetric\tvalue\tsignature\n"]
        for hyp, scores in results:
            for s in scores:
                lines.append(f"{_tsv_cell(hyp)}\t{s.name}\t{fmt_score(s.value)}\t{s.signature}\n")
        return "".join(lines)
    multi = len(results) > 1
    lines = []
    for hyp, scores in results:
        for s in scores:
            prefix = f"{hyp}: " if multi else ""
            lines.append(f"{prefix}{s.signature} = {_bold(fmt_score(s.value), color)}\n")
    return "".join(lines)


FAVORITISM_COLUMNS = (
    "index",
    "delta_s",
    "delta_u",
    "favoritism",
    "favored",
    "ref",
    "hyp_s",
    "hyp_u",
)


def render_favoritism(
    records: Sequence[FavoritismRecord],
    metric: str,
    signature: str,
    config: Mapping[str, Any],
    fmt: str,
    color: bool = False,
) -> str:
    if fmt == "json":
        return _json(
            {
                "tool_version": __version__,
                "metric": metric,
                "signature": signature,
                "config": dict(config),
                "records": [
                    {
                        "index": r.segment_index,
                        "delta_s": r.delta_s,
                        "delta_u": r.delta_u,
                        "favoritism": r.favoritism,
                        "favored": r.favored,
                        "ref": r.ref,
                        "hyp_s": r.hyp_s,
                        "hyp_u": r.hyp_u,
                    }
                    for r in records
                ],
            }
        )
    if fmt == "tsv":
        lines = ["\t".join(FAVORITISM_COLUMNS) + "\n"]
        for r in records:
            cells = [
                str(r.segment_index),
                fmt_delta(r.delta_s),
                fmt_delta(r.delta_u),
                fmt_delta(r.favoritism),
                r.favored,
                _tsv_cell(r.ref or ""),
                _tsv_cell(r.hyp_s or ""),
                _tsv_cell(r.hyp_u or ""),
            ]
            lines.append("\t".join(cells) + "\n")
        return "".join(lines)
    out = [f"{signature}\n\n"]
    for r in records:
        out.append(
            f"{_bold(f'#{r.segment_index}', color)}  favoritism={fmt_delta(r.favoritism)}"
            f"  delta_s={fmt_delta(r.delta_s)}  delta_u={fmt_delta(r.delta_u)}"
            f"  favored={r.favored}\n"
            f"  ref:   {r.ref}\n  hyp_s: {r.hyp_s}\n  hyp_u: {r.hyp_u}\n"
        )
    return "".join(out)


def _cell_text(result: CorrelationResult | None) -> str:
    if result is None:
        return MISSING
    text = f"{result.tau:.3f}"
    return text if result.significant else text + NOT_SIGNIFICANT


def _agg_text(value: float | None) -> str:
    return MISSING if value is None else f"{value:.3f}"


def render_correlation(
    cells: Mapping[tuple[str, str], CorrelationResult | None],
    aggregates: Mapping[str, AggregateRow],
    alpha: float,
    fmt: str,
) -> str:
    settings = list(dict.fromkeys(s for s, _ in cells))
    metrics = list(aggregates)
    if fmt == "json":
        return _json(
            {
                "tool_version": __version__,
                "config": {"alpha": alpha},
                "cells": [
                    {
                        "setting": s,
                        "metric": m,
                        "tau": r.tau if r else None,
                        "p_value": r.p_value if r else None,
                        "n": r.n if r else None,
                        "significant": r.significant if r else False,
                    }
                    for (s, m), r in cells.items()
                ],
                "aggregate": {
                    m: {
                        "mean": a.mean,
                        "median": a.median,
                        "sd": a.sd,
                        "wins": a.wins,
                        "n_significant": a.n_significant,
                    }
                    for m, a in aggregates.items()
                },
            }
        )
    rows = [["setting", *metrics]]
    for s in settings:
        rows.append([s, *(_cell_text(cells.get((s, m))) for m in metrics)])
    rows.append(["Mean", *(_agg_text(aggregates[m].mean) for m in metrics)])
    rows.append(["Median", *(_agg_text(aggregates[m].median) for m in metrics)])
    rows.append(["SD", *(_agg_text(aggregates[m].sd) for m in metrics)])
    rows.append(["Wins", *(str(aggregates[m].wins) for m in metrics)])
    if fmt == "tsv":
        return "".join("\t".join(r) + "\n" for r in rows)
    return _align(rows)


TYPE_COLUMNS = ("type", "refs", "preds", "match", "P", "R", "F")


def render_types(scores: Sequence[ClassScore], beta: float, fmt: str) -> str:
    if fmt == "json":
        return _json(
            {
                "tool_version": __version__,
                "config": {"beta": beta},
                "types": [
                    {
                        "type": s.type_key,
                        "refs": s.stats.refs,
                        "preds": s.stats.preds,
                        "match": s.stats.match,
                        "P": s.precision,
                        "R": s.recall,
                        "F": s.f_beta,
                    }
                    for s in scores
                ],
            }
        )
    rows = [list(TYPE_COLUMNS)]
    for s in scores:
        rows.append(
            [
                _tsv_cell(s.type_key),
                str(s.stats.refs),
                str(s.stats.preds),
                str(s.stats.match),
                f"{s.precision:.6f}",
                f"{s.recall:.6f}",
                f"{s.f_beta:.6f}",
            ]
        )
    if fmt == "tsv":
        return "".join("\t".join(r) + "\n" for r in rows)
    return _align(rows)
