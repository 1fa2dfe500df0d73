"""Command-line interface.

Exit codes:
    0  success
    1  other scoring error (e.g. empty vocabulary)
    2  missing or unreadable input file
    3  line-count mismatch or zero-line corpus
    4  unsupported tokenizer
    5  favoritism needs at least 2 segments
    6  malformed correlation table
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from macroeval import __version__
from macroeval.favoritism import rank_favoritism
from macroeval.metrics import METRICS, ScoreConfig, per_type_report, score_corpus, signature
from macroeval.rankstats import DEFAULT_ALPHA, TableFormatError, aggregate, correlate_table, read_table
from macroeval.reports import (
    color_enabled,
    render_correlation,
    render_favoritism,
    render_scores,
    render_types,
)
from macroeval.tokenizers import DEFAULT_TOKENIZER, UnsupportedTokenizerError, get_tokenizer
from macroeval.typestats import count_corpus

EXIT_ERROR = 1
EXIT_MISSING_FILE = 2
EXIT_MISALIGNED = 3
EXIT_TOKENIZER = 4
EXIT_TOO_SHORT = 5
EXIT_BAD_TABLE = 6


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def read_lines(path: str) -> list[str]:
    """One segment per line; LF or CRLF, final newline optional."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8", newline="") as f:
                text = f.read()
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        raise CLIError(EXIT_MISSING_FILE, f"cannot open {path}: {e.strerror}") from None
    except UnicodeDecodeError as e:
        raise CLIError(EXIT_MISSING_FILE, f"{path} is not valid UTF-8: {e.reason}") from None
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def _check_aligned(named: Sequence[tuple[str, list[str]]]) -> None:
    (first_name, first), *rest = named
    for name, lines in rest:
        if len(lines) != len(first):
            raise CLIError(
                EXIT_MISALIGNED,
                f"line count mismatch: {first_name} has {len(first)} lines, "
                f"{name} has {len(lines)}",
            )
    if not first:
        raise CLIError(EXIT_MISALIGNED, f"{first_name} has 0 lines")


def _config(args: argparse.Namespace) -> ScoreConfig:
    try:
        get_tokenizer(args.tokenizer)
    except UnsupportedTokenizerError as e:
        raise CLIError(EXIT_TOKENIZER, str(e)) from None
    return ScoreConfig(args.tokenizer, args.lowercase, args.lang)


def _config_echo(args: argparse.Namespace, **extra) -> dict:
    echo = {"tokenizer": args.tokenizer, "lowercase": args.lowercase, "lang_pair": args.lang}
    echo.update(extra)
    return echo


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _at_least_one(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def cmd_score(args: argparse.Namespace) -> str:
    config = _config(args)
    refs = read_lines(args.ref)
    hyp_paths = args.hyps or ["-"]
    hyps = [(p, read_lines(p)) for p in hyp_paths]
    for path, lines in hyps:
        _check_aligned([(args.ref, refs), (path, lines)])
    results = []
    for path, lines in hyps:
        try:
            scores = score_corpus(lines, refs, args.metrics, args.beta, args.k, config)
        except ValueError as e:
            raise CLIError(EXIT_ERROR, f"{path}: {e}") from None
        results.append((path, scores))
    echo = _config_echo(args, metrics=list(args.metrics), beta=args.beta, k=args.k)
    return render_scores(results, echo, args.output, color_enabled())


def cmd_favoritism(args: argparse.Namespace) -> str:
    config = _config(args)
    refs = read_lines(args.ref)
    sys_a = read_lines(args.sys_a)
    sys_b = read_lines(args.sys_b)
    _check_aligned([(args.ref, refs), (args.sys_a, sys_a), (args.sys_b, sys_b)])
    if len(refs) < 2:
        raise CLIError(EXIT_TOO_SHORT, "favoritism needs at least 2 segments")
    try:
        records = rank_favoritism(
            args.metric, refs, sys_a, sys_b, args.top_k, args.beta, args.k, config
        )
    except ValueError as e:
        raise CLIError(EXIT_ERROR, str(e)) from None
    beta = None if args.metric == "bleu" else args.beta
    k = args.k if args.metric == "microf" else None
    sig = signature(args.metric, config, beta, k)
    echo = _config_echo(
        args, metric=args.metric, beta=args.beta, k=args.k, system_s=args.sys_a, system_u=args.sys_b
    )
    return render_favoritism(records, args.metric, sig, echo, args.output, color_enabled())


def _table_paths(inputs: Sequence[str]) -> list[Path]:
    paths = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.tsv")))
        elif p.is_file():
            paths.append(p)
        else:
            raise CLIError(EXIT_MISSING_FILE, f"cannot open {item}: no such file or directory")
    if not paths:
        raise CLIError(EXIT_MISSING_FILE, "no .tsv table files found")
    return paths


def cmd_correlate(args: argparse.Namespace) -> str:
    paths = _table_paths(args.tables)
    try:
        table = read_table(paths, args.alpha)
    except TableFormatError as e:
        raise CLIError(EXIT_BAD_TABLE, f"malformed table: {e}") from None
    except UnicodeDecodeError as e:
        raise CLIError(EXIT_BAD_TABLE, f"malformed table: not valid UTF-8: {e.reason}") from None
    cells = correlate_table(table)
    return render_correlation(cells, aggregate(cells, args.alpha), args.alpha, args.output)


def cmd_report_types(args: argparse.Namespace) -> str:
    config = _config(args)
    refs = read_lines(args.ref)
    hyps = read_lines(args.hyp)
    _check_aligned([(args.ref, refs), (args.hyp, hyps)])
    corpus = count_corpus(
        config.tokenize(config.preprocess(hyps)), config.tokenize(config.preprocess(refs))
    )
    return render_types(per_type_report(corpus, args.beta, args.sort, args.top), args.beta, args.output)


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--tokenizer",
        "-tok",
        default=default(DEFAULT_TOKENIZER),
        help="word tokenizer: 13a (default) or none",
    )
    parser.add_argument(
        "--lowercase", "-lc", action="store_true", default=default(False), help="lowercase all input"
    )
    parser.add_argument(
        "--output",
        "-o",
        choices=("text", "json", "tsv"),
        default=default("text"),
        help="report format (default: text)",
    )
    parser.add_argument(
        "--lang", "-l", default=default("xx-yy"), help="language pair tag for signatures"
    )


def _add_f_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", "-b", type=_positive, default=1.0, help="F-beta weight (default: 1)")
    parser.add_argument(
        "-k", type=_non_negative, default=1.0, help="MicroF smoothing constant (default: 1)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macroeval",
        description="Corpus-level MT evaluation: MacroF/MicroF, BLEU, chrF, favoritism, "
        "and Kendall tau against human judgments.",
    )
    parser.add_argument("--version", "-V", action="version", version=f"macroeval {__version__}")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("score", help="corpus scores of one or more hypothesis files")
    _add_common(p, suppress=True)
    p.add_argument("ref", help="reference file, one segment per line")
    p.add_argument("hyps", nargs="*", help="hypothesis files (default: stdin)")
    p.add_argument(
        "--metrics",
        "-m",
        nargs="+",
        choices=METRICS,
        default=["macrof", "microf"],
        help="metrics to compute (default: macrof microf)",
    )
    _add_f_params(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("favoritism", help="segments a metric most favors for one system")
    _add_common(p, suppress=True)
    p.add_argument("ref")
    p.add_argument("sys_a", help="hypotheses of system S")
    p.add_argument("sys_b", help="hypotheses of system U")
    p.add_argument("--metric", "-m", choices=METRICS, default="macrof")
    p.add_argument("--top-k", type=_at_least_one, default=10)
    _add_f_params(p)
    p.set_defaults(func=cmd_favoritism)

    p = sub.add_parser("correlate", help="Kendall tau of metric columns vs human scores")
    _add_common(p, suppress=True)
    p.add_argument("tables", nargs="+", help="TSV files or directories of *.tsv")
    p.add_argument("--alpha", type=_positive, default=DEFAULT_ALPHA)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("report-types", help="per-type precision/recall/F table")
    _add_common(p, suppress=True)
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--sort", choices=("freq", "f"), default="freq")
    p.add_argument("--top", type=_at_least_one, default=500)
    p.add_argument("--beta", "-b", type=_positive, default=1.0)
    p.set_defaults(func=cmd_report_types)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        output = args.func(args)
    except CLIError as e:
        print(f"macroeval: error: {e}", file=sys.stderr)
        return e.code
    sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
