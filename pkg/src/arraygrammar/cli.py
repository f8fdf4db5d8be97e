"""``iag`` command line: derive, check, enumerate, census, validate, render.

Exit codes: 0 success/derivable, 1 definite negative, 2 input error,
3 derivation dead end, 4 inconclusive or capped search.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from pathlib import Path

from .dsl import GrammarSyntaxError, GrammarWarning, load_grammar
from .engine import TERMINAL, EngineConfig, derive_random, replay
from .grammar import Grammar, builtin_cpag, is_context_free, validate_grammar
from .grid import (
    Coord,
    Grid,
    Pattern,
    PatternFormatError,
    pattern_from_key,
    read_grid,
    read_pattern,
    render_pbm,
)
from .oracle import (
    DEFAULT_CAP,
    CensusQuery,
    FeasibilityError,
    Verdict,
    census,
    coverage_report,
    derivable_set,
    is_derivable,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_DEAD_END = 3
EXIT_INCONCLUSIVE = 4

BUILTINS = {"cpag": builtin_cpag}


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


def _window(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)[xX](\d+)", text)
    if not m or int(m[1]) < 1 or int(m[2]) < 1:
        raise argparse.ArgumentTypeError(f"window must look like RxC with positive sizes, got {text!r}")
    return int(m[1]), int(m[2])


def _coord(text: str) -> Coord:
    m = re.fullmatch(r"(\d+),(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"coordinate must look like r,c, got {text!r}")
    return Coord(int(m[1]), int(m[2]))


def _starts(text: str):
    return None if text == "all" else (_coord(text),)


def _load_grammar(args, strict: bool = True) -> Grammar:
    if args.builtin:
        return BUILTINS[args.builtin]()
    if not args.grammar:
        raise InputError("give a grammar file or --builtin cpag")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", GrammarWarning)
            grammar = load_grammar(args.grammar, strict=strict)
    except OSError as exc:
        raise InputError(f"cannot read {args.grammar}: {exc.strerror}") from None
    except GrammarSyntaxError as exc:
        raise InputError("\n".join(f"{args.grammar}:{d}" for d in exc.diagnostics)) from None
    for w in caught:
        print(f"{args.grammar}:{w.message}", file=sys.stderr)
    return grammar


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_target(text: str, grammar: Grammar | None) -> Pattern | Grid:
    try:
        return read_pattern(text)
    except PatternFormatError:
        pass
    try:
        return read_grid(text, grammar.symbol if grammar else None)
    except PatternFormatError as exc:
        raise InputError(f"malformed pattern file: {exc}") from None


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2))
        return
    for key, value in doc.items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, dict):
            value = " ".join(f"{k}={v}" for k, v in value.items())
        elif isinstance(value, list):
            value = " ".join(str(v) for v in value)
        elif value is None:
            value = "-"
        print(f"{key}: {value}")


def _render_keys(keys, rows: int, cols: int) -> None:
    for k in keys:
        print(f"\n[{k}]")
        print(pattern_from_key(k, rows, cols).to_text())


def cmd_derive(args) -> int:
    grammar = _load_grammar(args)
    config = EngineConfig(
        connectivity=args.connectivity, rng_seed=args.seed, max_steps=args.max_steps
    )
    rows, cols = args.window
    if not (0 <= args.start.row < rows and 0 <= args.start.col < cols):
        raise InputError(f"start {args.start.row},{args.start.col} is outside the {rows}x{cols} window")
    trace = derive_random(grammar, args.window, args.start, config)
    if args.trace:
        _write(args.trace, trace.to_text())
    print(trace.final.to_text())
    print(f"reason: {trace.reason}", file=sys.stderr)
    return EXIT_OK if trace.reason == TERMINAL else EXIT_DEAD_END


def cmd_check(args) -> int:
    grammar = _load_grammar(args)
    target = _read_target(_read_text(args.pattern), grammar)
    window = (target.rows, target.cols)
    starts = args.starts
    if starts is not None and not all(0 <= s.row < window[0] and 0 <= s.col < window[1] for s in starts):
        raise InputError("start position is outside the pattern window")
    config = EngineConfig(connectivity=args.connectivity)
    result = is_derivable(grammar, window, target, starts, config, cap=args.budget)
    print(f"verdict: {result.verdict.value}", file=sys.stderr)
    print(f"visited: {result.visited}", file=sys.stderr)
    if result.verdict is Verdict.DERIVABLE:
        replay(grammar, result.trace, config)
        _write(args.trace, result.trace.to_text())
        return EXIT_OK
    if result.verdict is Verdict.NOT_DERIVABLE:
        return EXIT_NEGATIVE
    return EXIT_INCONCLUSIVE


def cmd_census(args) -> int:
    rows, cols = args.window
    try:
        query = CensusQuery(args.window, args.connectivity, args.center_fixed, args.grains)
        report = census(query, materialize=args.list, workers=args.threads)
    except (ValueError, FeasibilityError) as exc:
        raise InputError(str(exc)) from None
    doc = {
        "window": f"{rows}x{cols}",
        "connectivity": query.connectivity,
        "center_fixed": query.center_fixed,
        "grains": query.grain_count,
        "count": report.count,
        "includes_empty": report.includes_empty,
        "by_grains": {str(k): v for k, v in report.by_grains.items()},
    }
    if args.list:
        doc["keys"] = list(report.keys)
    _emit(doc, args.format)
    if args.list and args.format == "text":
        _render_keys(report.keys, rows, cols)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.cap < 1:
        raise InputError("--cap must be at least 1")
    grammar = _load_grammar(args)
    rows, cols = args.window
    if args.starts is not None and not all(0 <= s.row < rows and 0 <= s.col < cols for s in args.starts):
        raise InputError("start position is outside the window")
    config = EngineConfig(connectivity=args.connectivity)
    doc: dict = {"grammar": grammar.name, "window": f"{rows}x{cols}",
                 "starts": "all" if args.starts is None else f"{args.starts[0].row},{args.starts[0].col}"}
    if args.coverage:
        try:
            rep = coverage_report(grammar, args.window, args.connectivity, config,
                                  center_fixed=args.center_fixed, starts=args.starts,
                                  cap=args.cap, workers=args.threads)
        except (ValueError, FeasibilityError) as exc:
            raise InputError(str(exc)) from None
        doc.update({
            "connectivity": rep.connectivity,
            "center_fixed": rep.center_fixed,
            "derivable": rep.derivable_count,
            "connected": rep.connected_count,
            "visited": rep.visited,
            "search_exhausted": rep.search_exhausted,
            "readings": list(rep.readings) if args.format == "json" else " | ".join(rep.readings),
            "derivable_not_connected_count": len(rep.derivable_not_connected),
            "derivable_not_connected": list(rep.derivable_not_connected),
            "connected_not_derivable_count": len(rep.connected_not_derivable),
            "connected_not_derivable": list(rep.connected_not_derivable),
        })
        exhausted = rep.search_exhausted
    else:
        found = derivable_set(grammar, args.window, args.starts, config, cap=args.cap, workers=args.threads)
        doc.update({
            "derivable": len(found.keys),
            "visited": found.visited,
            "search_exhausted": found.search_exhausted,
        })
        if args.list:
            doc["keys"] = sorted(found.keys)
        exhausted = found.search_exhausted
    _emit(doc, args.format)
    if args.list and args.format == "text" and not args.coverage:
        _render_keys(doc["keys"], rows, cols)
    return EXIT_OK if exhausted else EXIT_INCONCLUSIVE


def cmd_validate(args) -> int:
    grammar = _load_grammar(args, strict=False)
    report = validate_grammar(grammar)
    print(f"grammar: {grammar.name}")
    print(f"note: {report.header}")
    for v in report.for_rule(None):
        print(f"grammar: FAIL {v.condition}: {v.detail}")
    for rule in grammar.rules:
        problems = report.for_rule(rule.id)
        failed = {v.condition for v in problems}
        marks = " ".join(f"{c}={'FAIL' if c in failed else 'ok'}" for c in ("C1", "C2", "C3"))
        line = f"{rule.id}: {marks}"
        if args.classify:
            line += f" context_free={'yes' if is_context_free(rule) else 'no'}"
        print(line)
        for v in problems:
            print(f"  {v.condition}: {v.detail}")
    if args.classify:
        cf = bool(grammar.rules) and all(is_context_free(r) for r in grammar.rules)
        print(f"context_free_grammar: {'yes' if cf else 'no'}")
    print(f"violations: {len(report.violations)}")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_render(args) -> int:
    if args.pattern:
        try:
            pattern = read_pattern(_read_text(args.pattern))
        except PatternFormatError as exc:
            raise InputError(f"malformed pattern file: {exc}") from None
    else:
        if args.key is None or args.window is None:
            raise InputError("give --pattern, or --key together with --window")
        try:
            pattern = pattern_from_key(args.key, *args.window)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    text = render_pbm(pattern) if args.format == "pbm" else pattern.to_text() + "\n"
    _write(args.out, text)
    return EXIT_OK


def _grammar_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("grammar", nargs="?", help="path to a .iag grammar file")
    p.add_argument("--builtin", choices=sorted(BUILTINS), help="use a built-in grammar instead of a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iag", description="Isometric array grammar toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="random derivation from a start cell")
    _grammar_args(p)
    p.add_argument("--window", type=_window, default=(3, 3))
    p.add_argument("--start", type=_coord, default=Coord(0, 0))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", help="write the trace file here")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="decide whether a pattern is derivable")
    _grammar_args(p)
    p.add_argument("--pattern", required=True, help="pattern (0/1, a/b) or spaced grid file")
    p.add_argument("--starts", type=_starts, default=None, help="'all' or r,c (default all)")
    p.add_argument("--budget", type=int, default=DEFAULT_CAP, help="visited-form cap per start")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--trace", help="write the witness trace here instead of stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("census", help="count connected binary patterns by brute force")
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--center-fixed", action="store_true")
    p.add_argument("--grains", type=int, default=None)
    p.add_argument("--list", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("enumerate", help="derivable set of a grammar, optionally against the census")
    _grammar_args(p)
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--starts", type=_starts, default=None, help="'all' or r,c (default all)")
    p.add_argument("--coverage", action="store_true")
    p.add_argument("--center-fixed", action="store_true", help="coverage only: require a center grain")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="visited-form cap per start")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--list", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("validate", help="check rules against C1-C3")
    _grammar_args(p)
    p.add_argument("--classify", action="store_true", help="also report context-freeness")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="render a pattern as ASCII or plain PBM")
    p.add_argument("--pattern")
    p.add_argument("--key", type=int)
    p.add_argument("--window", type=_window)
    p.add_argument("--format", choices=("ascii", "pbm"), default="ascii")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "builtin", None) and getattr(args, "grammar", None):
        parser.error("give either a grammar file or --builtin, not both")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"iag: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
