"""Isometric array rules and grammars, static validation, and the built-in CPAG."""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from .grid import BLANK, Coord, Symbol, nonterminal, normalize_shape, terminal

__all__ = [
    "C4_NOTE",
    "Grammar",
    "InvalidRuleError",
    "Rule",
    "RuleSide",
    "ValidationReport",
    "Violation",
    "builtin_cpag",
    "is_context_free",
    "rule_violations",
    "validate_grammar",
]

C4_NOTE = "C4 (host array stays connected): dynamic, enforced at application time"


class InvalidRuleError(ValueError):
    """A rule breaks one of the static isometry conditions C1-C3."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(f"{v.condition}: {v.detail}" for v in violations))


class Violation(NamedTuple):
    rule_id: str | None
    condition: str
    detail: str


@dataclass(frozen=True)
class RuleSide:
    """One side of a rule: symbols over a normalized shape.

    ``cells`` is stored sorted by coordinate so equal sides compare equal.
    """

    cells: tuple[tuple[Coord, Symbol], ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a rule side needs at least one cell")
        coords = [c for c, _ in self.cells]
        if len(set(coords)) != len(coords):
            raise ValueError("duplicate coordinates in rule side")
        norm = normalize_shape(coords)
        if norm != frozenset(coords):
            raise ValueError("rule side shape is not normalized")

    @classmethod
    def from_mapping(cls, symbols: Mapping[tuple[int, int], Symbol]) -> RuleSide:
        if not symbols:
            raise ValueError("a rule side needs at least one cell")
        r0 = min(r for r, _ in symbols)
        c0 = min(c for _, c in symbols)
        return cls(tuple(sorted((Coord(r - r0, c - c0), s) for (r, c), s in symbols.items())))

    @classmethod
    def from_text(cls, text: str, resolve: Callable[[str], Symbol]) -> RuleSide:
        """Build from spaced rows; ``.`` marks a coordinate outside the shape.

        Rows are separated by newlines or ``/``: ``"S #"``, ``"A / #"``.
        """
        lines = [ln.strip() for ln in text.replace("/", "\n").splitlines() if ln.strip()]
        symbols = {}
        for r, ln in enumerate(lines):
            for c, tok in enumerate(ln.split()):
                if tok != ".":
                    symbols[(r, c)] = resolve(tok)
        return cls.from_mapping(symbols)

    @property
    def shape(self) -> frozenset[Coord]:
        return frozenset(c for c, _ in self.cells)

    @property
    def symbols(self) -> dict[Coord, Symbol]:
        return dict(self.cells)

    @property
    def height(self) -> int:
        return 1 + max(c.row for c, _ in self.cells)

    @property
    def width(self) -> int:
        return 1 + max(c.col for c, _ in self.cells)

    def row_strings(self) -> list[str]:
        sym = self.symbols
        return [
            " ".join(sym[(r, c)].name if (r, c) in sym else "." for c in range(self.width))
            for r in range(self.height)
        ]

    def __str__(self) -> str:
        return " / ".join(self.row_strings())


def rule_violations(rule_id: str | None, alpha: RuleSide, beta: RuleSide) -> list[Violation]:
    """Static conditions C1-C3 for a single alpha -> beta pair."""
    out = []
    if alpha.shape != beta.shape:
        out.append(Violation(rule_id, "C1", f"shapes differ: alpha {alpha} vs beta {beta}"))
    a, b = alpha.symbols, beta.symbols
    if not any(s.is_nonterminal for s in a.values()):
        out.append(Violation(rule_id, "C2", f"alpha {alpha} contains no nonterminal"))
    for coord in sorted(a):
        s = a[coord]
        if s.is_terminal and b.get(coord) != s:
            got = b[coord].name if coord in b else "nothing"
            out.append(Violation(
                rule_id, "C3", f"terminal {s.name!r} at {coord} is rewritten to {got!r}"
            ))
    return out


@dataclass(frozen=True, slots=True)
class Rule:
    """An isometric rewrite ``alpha -> beta``.

    The constructor rejects rules breaking C1-C3. :meth:`unchecked` exists
    so that validation tooling can hold deliberately broken rules.
    """

    id: str
    alpha: RuleSide
    beta: RuleSide
    source_group: str | None = None

    def __post_init__(self) -> None:
        problems = rule_violations(self.id, self.alpha, self.beta)
        if problems:
            raise InvalidRuleError(problems)
        assert self.alpha.shape == self.beta.shape

    @classmethod
    def unchecked(
        cls, id: str, alpha: RuleSide, beta: RuleSide, source_group: str | None = None
    ) -> Rule:
        rule = object.__new__(cls)
        object.__setattr__(rule, "id", id)
        object.__setattr__(rule, "alpha", alpha)
        object.__setattr__(rule, "beta", beta)
        object.__setattr__(rule, "source_group", source_group)
        return rule

    def symbols(self) -> Iterable[Symbol]:
        for _, s in self.alpha.cells:
            yield s
        for _, s in self.beta.cells:
            yield s

    def __str__(self) -> str:
        return f"{self.id}: [{self.alpha}] -> [{self.beta}]"


@dataclass(frozen=True)
class Grammar:
    """``G = (N, T, P, S, #)`` with rules expanded one alternative per :class:`Rule`.

    Construction does not police the alphabet invariants; run
    :func:`validate_grammar` for that.
    """

    name: str
    nonterminals: frozenset[str]
    terminals: frozenset[str]
    start: str
    rules: tuple[Rule, ...] = ()
    blank: Symbol = field(default=BLANK)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "rules", tuple(self.rules))

    @cached_property
    def _rule_index(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}

    def rule(self, rule_id: str) -> Rule:
        try:
            return self._rule_index[rule_id]
        except KeyError:
            raise KeyError(f"grammar {self.name!r} has no rule {rule_id!r}") from None

    def symbol(self, name: str) -> Symbol:
        """Resolve a cell character against this grammar's alphabets."""
        if name == self.blank.name:
            return self.blank
        if name in self.nonterminals:
            return nonterminal(name)
        if name in self.terminals:
            return terminal(name)
        raise KeyError(f"{name!r} is not declared in grammar {self.name!r}")

    @property
    def start_symbol(self) -> Symbol:
        return nonterminal(self.start)

    def structurally_equal(self, other: Grammar) -> bool:
        """Same name, alphabets, start, blank and multiset of expanded rules."""
        def rules(g: Grammar) -> Counter:
            return Counter((r.id, r.alpha, r.beta) for r in g.rules)

        return (
            self.name == other.name
            and self.nonterminals == other.nonterminals
            and self.terminals == other.terminals
            and self.start == other.start
            and self.blank == other.blank
            and rules(self) == rules(other)
        )


@dataclass(frozen=True)
class ValidationReport:
    grammar_name: str
    violations: tuple[Violation, ...]
    header: str = C4_NOTE

    @property
    def ok(self) -> bool:
        return not self.violations

    def for_rule(self, rule_id: str) -> list[Violation]:
        return [v for v in self.violations if v.rule_id == rule_id]


def validate_grammar(grammar: Grammar) -> ValidationReport:
    out: list[Violation] = []
    overlap = grammar.nonterminals & grammar.terminals
    if overlap:
        out.append(Violation(None, "alphabet", f"N and T share {''.join(sorted(overlap))!r}"))
    if grammar.blank.name in grammar.nonterminals | grammar.terminals:
        out.append(Violation(None, "alphabet", f"blank {grammar.blank.name!r} is declared in N or T"))
    if grammar.start not in grammar.nonterminals:
        out.append(Violation(None, "alphabet", f"start {grammar.start!r} is not a nonterminal"))

    counts = Counter(r.id for r in grammar.rules)
    for rid in sorted(i for i, n in counts.items() if n > 1):
        out.append(Violation(rid, "structural", f"rule id {rid!r} used {counts[rid]} times"))

    for rule in grammar.rules:
        out.extend(rule_violations(rule.id, rule.alpha, rule.beta))
        undeclared = set()
        for s in rule.symbols():
            if s.is_blank:
                if s != grammar.blank:
                    undeclared.add(s.name)
            else:
                declared = grammar.nonterminals if s.is_nonterminal else grammar.terminals
                if s.name not in declared:
                    undeclared.add(s.name)
        for name in sorted(undeclared):
            out.append(Violation(rule.id, "alphabet", f"symbol {name!r} is not declared"))
    return ValidationReport(grammar.name, tuple(out))


def is_context_free(rule: Rule) -> bool:
    """Exactly one nonterminal in alpha, every other alpha cell blank."""
    cells = [s for _, s in rule.alpha.cells]
    return sum(s.is_nonterminal for s in cells) == 1 and all(
        s.is_nonterminal or s.is_blank for s in cells
    )


# Each family lists (alpha, [beta alternatives]); alternative k gets id family + "abcde"[k].
_CPAG_FAMILIES = (
    ("R1", "S #", ["a A", "b A"]),
    ("R2", "S / #", ["a / A", "A / a", "b / A", "A / b"]),
    ("R4", "A #", ["a A", "b A", "# A"]),
    ("R5", "A / #", ["a / A", "A / a", "b / A", "A / b", "# / A"]),
    ("R6", "# / A", ["A / a", "A / b"]),
    ("R7", "# A", ["A a", "A #", "a A", "b A", "A b"]),
    ("R8", "A", ["a", "b"]),
)


def builtin_cpag() -> Grammar:
    """The Connected Pattern Array Grammar with its 23 expanded rules.

    N = {S, A}, T = {a, b}; ``a`` is a grain, ``b`` background.
    """
    n, t = frozenset("SA"), frozenset("ab")

    def resolve(ch: str) -> Symbol:
        if ch == "#":
            return BLANK
        return nonterminal(ch) if ch in n else terminal(ch)

    rules = []
    for family, alpha, betas in _CPAG_FAMILIES:
        a = RuleSide.from_text(alpha, resolve)
        for letter, beta in zip("abcde", betas):
            rules.append(Rule(family + letter, a, RuleSide.from_text(beta, resolve), family))
    return Grammar("cpag", n, t, "S", tuple(rules))
