"""Reader and writer for ``.iag`` grammar files.

A file is a header followed by rule blocks::

    ; comment
    @grammar cpag
    @nonterminals S A
    @terminals a b
    @start S
    @blank #
    @rule R1
    S #
    =>
    a A
    /
    b A
    @end

Cells are single characters separated by single spaces, ``#`` is the blank
and ``.`` marks a coordinate outside the rule's shape. Alternatives are
separated by ``/`` lines; alternative *k* of a multi-alternative rule ``R``
becomes rule ``R`` + the *k*-th lowercase letter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from .grammar import Grammar, InvalidRuleError, Rule, RuleSide
from .grid import BLANK, Symbol, nonterminal, terminal

__all__ = [
    "GrammarSyntaxError",
    "GrammarWarning",
    "ParseDiagnostic",
    "SourcePos",
    "load_grammar",
    "parse_grammar",
    "serialize_grammar",
]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_RESERVED = {"#", ".", ";", "@", "/"}


@dataclass(frozen=True, order=True)
class SourcePos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class ParseDiagnostic:
    pos: SourcePos
    severity: str  # "error" | "warning"
    message: str
    condition: str | None = None  # C1, C2, C3, alphabet, syntax, structural

    def __str__(self) -> str:
        tag = f" [{self.condition}]" if self.condition else ""
        return f"{self.pos}: {self.severity}{tag}: {self.message}"


class GrammarSyntaxError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


class GrammarWarning(UserWarning):
    def __init__(self, diagnostic: ParseDiagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


@dataclass
class _Block:
    line: int
    rows: list[list[tuple[int, str]]]  # per row: (column, char)
    lines: list[int]

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def mask(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (r, c) for r, row in enumerate(self.rows) for c, (_, ch) in enumerate(row) if ch != "."
        )


@dataclass
class _RawRule:
    id: str
    pos: SourcePos
    alpha: _Block | None = None
    betas: list[_Block] | None = None


class _Parser:
    def __init__(self, text: str, strict: bool):
        self.lines = [ln.removesuffix("\r") for ln in text.split("\n")]
        if len(self.lines) > 1 and self.lines[-1] == "":
            self.lines.pop()
        self.strict = strict
        self.diags: list[ParseDiagnostic] = []
        self.headers: dict[str, tuple[SourcePos, list[str]]] = {}
        self.raw_rules: list[_RawRule] = []

    def error(self, line: int, col: int, message: str, condition: str | None = "syntax") -> None:
        self.diags.append(ParseDiagnostic(self._clamp(line, col), "error", message, condition))

    def warn(self, line: int, col: int, message: str) -> None:
        self.diags.append(ParseDiagnostic(self._clamp(line, col), "warning", message))

    def _clamp(self, line: int, col: int) -> SourcePos:
        line = min(max(line, 1), max(len(self.lines), 1))
        width = len(self.lines[line - 1]) if self.lines else 0
        return SourcePos(line, min(max(col, 1), width + 1))

    # -- pass 1: structure -------------------------------------------------

    def scan(self) -> None:
        i = 0
        n = len(self.lines)
        while i < n:
            raw = self.lines[i]
            stripped = raw.strip()
            lineno = i + 1
            if not stripped or stripped.startswith(";"):
                i += 1
                continue
            if not stripped.startswith("@"):
                self.error(lineno, raw.index(stripped[0]) + 1, f"expected a directive, found {stripped[:20]!r}")
                i += 1
                continue
            col = raw.index("@") + 1
            word, _, rest = stripped.partition(" ")
            args = rest.split()
            if word == "@rule":
                if len(args) != 1:
                    self.error(lineno, col, "@rule takes exactly one identifier")
                    args = [f"?{lineno}"]
                i = self.scan_rule(i, _RawRule(args[0], SourcePos(lineno, col)))
                continue
            if word in ("@grammar", "@nonterminals", "@terminals", "@start", "@blank"):
                if word in self.headers:
                    self.error(lineno, col, f"duplicate {word} directive")
                else:
                    self.headers[word] = (SourcePos(lineno, col), args)
            elif word == "@end":
                self.error(lineno, col, "@end without an open @rule")
            else:
                self.error(lineno, col, f"unknown directive {word!r}")
            i += 1

    def scan_rule(self, i: int, rule: _RawRule) -> int:
        """Consume a rule block starting at line index *i*; return the next index."""
        i += 1
        blocks: list[_Block] = []
        current: _Block | None = None
        seen_arrow = False
        n = len(self.lines)
        while i < n:
            raw = self.lines[i].rstrip()
            stripped = raw.strip()
            lineno = i + 1
            if not stripped or stripped.startswith(";"):
                i += 1
                continue
            if stripped == "@end":
                i += 1
                break
            if stripped.startswith("@"):
                self.error(lineno, raw.index("@") + 1, f"rule {rule.id!r} is missing @end")
                break
            if stripped in ("=>", "/"):
                if current is None:
                    self.error(lineno, raw.index(stripped) + 1, f"empty block before {stripped!r}")
                if stripped == "=>":
                    if seen_arrow:
                        self.error(lineno, raw.index(stripped) + 1, "second '=>' in rule")
                    seen_arrow = True
                elif not seen_arrow:
                    self.error(lineno, raw.index(stripped) + 1, "'/' before '=>'")
                if current is not None:
                    blocks.append(current)
                current = None
                if stripped == "=>" and not blocks:
                    blocks.append(None)  # placeholder keeps alpha/beta indexing aligned
                i += 1
                continue
            cells = self.scan_row(lineno, raw)
            if cells is not None:
                if current is None:
                    current = _Block(lineno, [], [])
                if current.rows and len(cells) != current.width:
                    self.error(lineno, 1, f"row has {len(cells)} cells, block expects {current.width}")
                else:
                    current.rows.append(cells)
                    current.lines.append(lineno)
            i += 1
        else:
            self.error(n, len(self.lines[-1]) + 1 if self.lines else 1,
                       f"rule {rule.id!r} is missing @end")
        if current is not None:
            blocks.append(current)
        if not seen_arrow:
            self.error(rule.pos.line, rule.pos.col, f"rule {rule.id!r} has no '=>'")
            return i
        if not blocks or blocks[0] is None:
            return i
        rule.alpha = blocks[0]
        rule.betas = [b for b in blocks[1:] if b is not None]
        if not rule.betas:
            self.error(rule.pos.line, rule.pos.col, f"rule {rule.id!r} has no right-hand side")
            return i
        self.raw_rules.append(rule)
        return i

    def scan_row(self, lineno: int, raw: str) -> list[tuple[int, str]] | None:
        tokens = raw.split(" ")
        out = []
        col = 1
        for tok in tokens:
            if len(tok) != 1:
                self.error(lineno, col, "cells must be single characters separated by single spaces")
                return None
            out.append((col, tok))
            col += 2
        return out

    # -- pass 2: semantics -------------------------------------------------

    def build(self) -> Grammar | None:
        def header(word: str, *, required: bool = True) -> tuple[SourcePos, list[str]] | None:
            if word not in self.headers and required:
                self.error(1, 1, f"missing {word} directive")
            return self.headers.get(word)

        name_h = header("@grammar")
        name = "grammar"
        if name_h:
            if len(name_h[1]) != 1:
                self.error(name_h[0].line, name_h[0].col, "@grammar takes exactly one name")
            else:
                name = name_h[1][0]

        def charset(word: str) -> dict[str, SourcePos]:
            h = header(word)
            out: dict[str, SourcePos] = {}
            if not h:
                return out
            pos, args = h
            for a in args:
                if len(a) != 1 or a in _RESERVED or not a.isprintable():
                    self.error(pos.line, pos.col, f"{word}: {a!r} is not a usable symbol character", "alphabet")
                elif a in out:
                    self.warn(pos.line, pos.col, f"{word}: {a!r} declared twice")
                else:
                    out[a] = pos
            if not args:
                self.error(pos.line, pos.col, f"{word} declares no symbols", "alphabet")
            return out

        nts = charset("@nonterminals")
        ts = charset("@terminals")
        for ch in sorted(set(nts) & set(ts)):
            pos = ts[ch]
            self.error(pos.line, pos.col, f"{ch!r} is declared both nonterminal and terminal", "alphabet")

        start = "S"
        start_h = header("@start")
        if start_h:
            pos, args = start_h
            if len(args) != 1 or len(args[0]) != 1:
                self.error(pos.line, pos.col, "@start takes exactly one symbol")
            else:
                start = args[0]
                if start not in nts:
                    self.error(pos.line, pos.col, f"start {start!r} is not a declared nonterminal", "alphabet")

        blank_h = header("@blank", required=False)
        if blank_h and blank_h[1] != ["#"]:
            self.error(blank_h[0].line, blank_h[0].col, "the blank symbol must be '#'")

        def resolve(ch: str) -> Symbol | None:
            if ch == "#":
                return BLANK
            if ch in nts:
                return nonterminal(ch)
            if ch in ts:
                return terminal(ch)
            return None

        rules: list[Rule] = []
        ids: dict[str, SourcePos] = {}
        for raw in self.raw_rules:
            alpha = self.side(raw.alpha, resolve)
            alpha_mask = raw.alpha.mask()
            betas = []
            for block in raw.betas:
                if len(block.rows) != len(raw.alpha.rows) or block.width != raw.alpha.width or block.mask() != alpha_mask:
                    self.error(block.line, 1,
                               f"rule {raw.id!r}: right-hand shape differs from the left-hand shape", "C1")
                    betas.append(None)
                else:
                    betas.append(self.side(block, resolve))
            if len(raw.betas) > len(_LETTERS):
                self.error(raw.pos.line, raw.pos.col, f"rule {raw.id!r} has more than {len(_LETTERS)} alternatives")
                continue
            multi = len(raw.betas) > 1
            for k, beta in enumerate(betas):
                rid = raw.id + _LETTERS[k] if multi else raw.id
                if rid in ids:
                    self.error(raw.pos.line, raw.pos.col, f"duplicate rule id {rid!r}", "structural")
                    continue
                ids[rid] = raw.pos
                if alpha is None or beta is None:
                    continue
                group = raw.id if multi else None
                if self.strict:
                    try:
                        rules.append(Rule(rid, alpha, beta, group))
                    except InvalidRuleError as exc:
                        for v in exc.violations:
                            self.error(raw.pos.line, raw.pos.col, f"rule {rid!r}: {v.detail}", v.condition)
                else:
                    rules.append(Rule.unchecked(rid, alpha, beta, group))

        if not self.raw_rules and not any(d.severity == "error" for d in self.diags):
            self.warn(len(self.lines), 1, "no rules")
        if any(d.severity == "error" for d in self.diags):
            return None
        return Grammar(name, frozenset(nts), frozenset(ts), start, tuple(rules))

    def side(self, block: _Block, resolve) -> RuleSide | None:
        symbols = {}
        ok = True
        for r, (row, lineno) in enumerate(zip(block.rows, block.lines)):
            for c, (col, ch) in enumerate(row):
                if ch == ".":
                    continue
                sym = resolve(ch)
                if sym is None:
                    self.error(lineno, col, f"undeclared symbol {ch!r}", "alphabet")
                    ok = False
                else:
                    symbols[(r, c)] = sym
        if not symbols:
            self.error(block.line, 1, "block has no cells inside the shape")
            return None
        return RuleSide.from_mapping(symbols) if ok else None


def parse_grammar(text: str, *, strict: bool = True) -> Grammar:
    """Parse ``.iag`` text.

    Raises :class:`GrammarSyntaxError` carrying positioned diagnostics.
    Warnings are issued as :class:`GrammarWarning`. With ``strict=False``,
    rules violating C2/C3 are kept (via :meth:`Rule.unchecked`) so that
    :func:`~arraygrammar.grammar.validate_grammar` can report them; shape
    mismatches (C1) are always parse errors.
    """
    parser = _Parser(text, strict)
    parser.scan()
    grammar = parser.build()
    diags = sorted(parser.diags, key=lambda d: d.pos)
    if grammar is None:
        raise GrammarSyntaxError([d for d in diags if d.severity == "error"])
    for d in diags:
        warnings.warn(GrammarWarning(d), stacklevel=2)
    return grammar


def load_grammar(path: str | Path, *, strict: bool = True) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"), strict=strict)


def _groups(rules: tuple[Rule, ...]) -> list[tuple[str, list[Rule]]]:
    out = []
    i = 0
    while i < len(rules):
        rule = rules[i]
        g = rule.source_group
        run = [rule]
        if g is not None and rule.id == g + "a":
            j = i + 1
            while (
                j < len(rules)
                and len(run) < len(_LETTERS)
                and rules[j].source_group == g
                and rules[j].id == g + _LETTERS[len(run)]
                and rules[j].alpha == rule.alpha
            ):
                run.append(rules[j])
                j += 1
        if len(run) > 1:
            out.append((g, run))
            i += len(run)
        else:
            out.append((rule.id, [rule]))
            i += 1
    return out


def serialize_grammar(grammar: Grammar) -> str:
    for nt in sorted(grammar.nonterminals):
        if nt.islower():
            warnings.warn(f"nonterminal {nt!r} is lowercase", UserWarning, stacklevel=2)
    lines = [
        f"@grammar {grammar.name}",
        "@nonterminals " + " ".join(sorted(grammar.nonterminals)),
        "@terminals " + " ".join(sorted(grammar.terminals)),
        f"@start {grammar.start}",
        f"@blank {grammar.blank.name}",
    ]
    for block_id, run in _groups(grammar.rules):
        lines.append("")
        lines.append(f"@rule {block_id}")
        lines.extend(run[0].alpha.row_strings())
        lines.append("=>")
        for k, rule in enumerate(run):
            if k:
                lines.append("/")
            lines.extend(rule.beta.row_strings())
        lines.append("@end")
    return "\n".join(lines) + "\n"
