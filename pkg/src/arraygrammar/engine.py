"""Rule matching, rewriting under the connectivity condition, random derivation and replay.

Windows are hard boundaries: a rule applies only where its whole shape fits
inside the window. Internally, sentential forms are handled as row-major
name strings (:meth:`Grid.key`), which is what the searches in
:mod:`arraygrammar.oracle` use as their visited-set identity.
"""

from __future__ import annotations

import random
import re
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import NamedTuple

from .grammar import Grammar, Rule
from .grid import (
    BLANK,
    Coord,
    Grid,
    is_connected,
    neighbours,
    new_grid,
    read_grid,
    support,
)

__all__ = [
    "C4RejectionError",
    "CompiledGrammar",
    "DerivationError",
    "DerivationTrace",
    "EngineConfig",
    "IntegrityError",
    "MatchError",
    "Placement",
    "ReplayError",
    "TraceFormatError",
    "apply",
    "derive_random",
    "initial_form",
    "iter_forms",
    "legal_moves",
    "matches",
    "read_trace",
    "replay",
]

TERMINAL = "terminal"
NO_RULE = "no applicable rule"
MAX_STEPS = "max steps reached"


class DerivationError(Exception):
    pass


class MatchError(DerivationError):
    """The rule's alpha does not match the grid at the placement."""


class C4RejectionError(DerivationError):
    """Applying the rule would disconnect the host array."""


class ReplayError(DerivationError):
    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"step {index}: {reason}")


class IntegrityError(DerivationError):
    """Replay reached a grid different from the recorded final grid."""


class TraceFormatError(ValueError):
    pass


class Placement(NamedTuple):
    rule_id: str
    anchor: Coord

    def __str__(self) -> str:
        return f"{self.rule_id} @ ({self.anchor.row},{self.anchor.col})"


@dataclass(frozen=True)
class EngineConfig:
    connectivity: int = 8
    enforce_c4: bool = True
    max_steps: int | None = None  # None means 4 * rows * cols
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity!r}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    def step_limit(self, rows: int, cols: int) -> int:
        return self.max_steps if self.max_steps is not None else 4 * rows * cols


@dataclass(frozen=True)
class DerivationTrace:
    grammar_name: str
    window: tuple[int, int]
    start: Coord
    steps: tuple[Placement, ...]
    final: Grid
    reason: str | None = None

    def to_text(self) -> str:
        lines = [
            f"grammar: {self.grammar_name}",
            f"window: {self.window[0]}x{self.window[1]}",
            f"start: {self.start.row},{self.start.col}",
        ]
        lines += [f"step {i}: {p}" for i, p in enumerate(self.steps, 1)]
        if self.reason is not None:
            lines.append(f"reason: {self.reason}")
        lines.append("final:")
        lines.append(self.final.to_text())
        return "\n".join(lines) + "\n"


_STEP_RE = re.compile(r"step (\d+): (\S+) @ \((\d+),(\d+)\)$")


def read_trace(text: str, grammar: Grammar | None = None) -> DerivationTrace:
    """Parse the trace file format written by :meth:`DerivationTrace.to_text`."""
    lines = text.splitlines()

    def header(i: int, name: str) -> str:
        if i >= len(lines) or not lines[i].startswith(name + ": "):
            raise TraceFormatError(f"line {i + 1}: expected '{name}: ...'")
        return lines[i][len(name) + 2:]

    name = header(0, "grammar")
    m = re.fullmatch(r"(\d+)x(\d+)", header(1, "window"))
    if not m:
        raise TraceFormatError("line 2: window must look like RxC")
    window = (int(m[1]), int(m[2]))
    m = re.fullmatch(r"(\d+),(\d+)", header(2, "start"))
    if not m:
        raise TraceFormatError("line 3: start must look like r,c")
    start = Coord(int(m[1]), int(m[2]))

    steps = []
    i = 3
    while i < len(lines) and lines[i].startswith("step "):
        m = _STEP_RE.match(lines[i])
        if not m or int(m[1]) != len(steps) + 1:
            raise TraceFormatError(f"line {i + 1}: malformed step")
        steps.append(Placement(m[2], Coord(int(m[3]), int(m[4]))))
        i += 1
    reason = None
    if i < len(lines) and lines[i].startswith("reason: "):
        reason = lines[i][len("reason: "):]
        i += 1
    if i >= len(lines) or lines[i] != "final:":
        raise TraceFormatError(f"line {i + 1}: expected 'final:'")
    body = "\n".join(lines[i + 1:])
    try:
        final = read_grid(body, grammar.symbol if grammar else None)
    except ValueError as exc:
        raise TraceFormatError(f"final grid: {exc}") from None
    if (final.rows, final.cols) != window:
        raise TraceFormatError("final grid does not match the window size")
    return DerivationTrace(name, window, start, tuple(steps), final, reason)


class _CompiledRule(NamedTuple):
    id: str
    height: int
    width: int
    cells: tuple[tuple[int, int, str, str], ...]  # (dr, dc, alpha name, beta name)


@dataclass
class CompiledGrammar:
    """Rules flattened to character tuples for a given window.

    ``successors`` is the hot path of every search; it yields legal moves in
    (rule id, row-major anchor) order.
    """

    grammar: Grammar
    rows: int
    cols: int
    config: EngineConfig = field(default_factory=EngineConfig)

    def __post_init__(self) -> None:
        self.nonterminals = frozenset(self.grammar.nonterminals)
        self.blank = self.grammar.blank.name
        self.rules = sorted(
            (
                _CompiledRule(
                    r.id,
                    r.alpha.height,
                    r.alpha.width,
                    tuple(
                        (c.row, c.col, s.name, r.beta.symbols[c].name)
                        for c, s in r.alpha.cells
                    ),
                )
                for r in self.grammar.rules
            ),
            key=lambda cr: cr.id,
        )
        # For each rule: offsets of alpha cells holding a nonterminal, by name.
        self._hooks = [
            [(dr, dc, a) for dr, dc, a, _ in cr.cells if a in self.nonterminals]
            for cr in self.rules
        ]
        self._adj = neighbours(self.rows, self.cols, self.config.connectivity)

    def rewrite(self, key: str, rule: _CompiledRule, anchor: Coord) -> str:
        cells = list(key)
        for dr, dc, _, b in rule.cells:
            cells[(anchor.row + dr) * self.cols + anchor.col + dc] = b
        return "".join(cells)

    def connected(self, key: str) -> bool:
        blank = self.blank
        filled = [i for i, ch in enumerate(key) if ch != blank]
        if len(filled) <= 1:
            return True
        adj = self._adj
        seen = {filled[0]}
        stack = [filled[0]]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen and key[j] != blank:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(filled)

    def successors(self, key: str) -> Iterator[tuple[Placement, str]]:
        rows, cols = self.rows, self.cols
        nt_cells = [(i // cols, i % cols, ch) for i, ch in enumerate(key) if ch in self.nonterminals]
        if not nt_cells:
            return
        check = self.config.enforce_c4
        for rule, hooks in zip(self.rules, self._hooks):
            found = set()
            for r, c, ch in nt_cells:
                for dr, dc, a in hooks:
                    if a != ch:
                        continue
                    ar, ac = r - dr, c - dc
                    if 0 <= ar <= rows - rule.height and 0 <= ac <= cols - rule.width:
                        found.add((ar, ac))
            for ar, ac in sorted(found):
                if all(key[(ar + dr) * cols + ac + dc] == a for dr, dc, a, _ in rule.cells):
                    anchor = Coord(ar, ac)
                    new = self.rewrite(key, rule, anchor)
                    if not check or self.connected(new):
                        yield Placement(rule.id, anchor), new

    def is_terminal(self, key: str) -> bool:
        return not any(ch in self.nonterminals for ch in key)


def initial_form(window: tuple[int, int], start: tuple[int, int], grammar: Grammar) -> Grid:
    """The start symbol at *start*, blanks everywhere else."""
    rows, cols = window
    grid = new_grid(rows, cols, BLANK)
    if not grid.in_bounds(start):
        raise IndexError(f"start {tuple(start)} is outside the {rows}x{cols} window")
    return grid.replace({start: grammar.start_symbol})


def _compile_one(rule: Rule) -> _CompiledRule:
    beta = rule.beta.symbols
    return _CompiledRule(
        rule.id, rule.alpha.height, rule.alpha.width,
        tuple((c.row, c.col, s, beta[c]) for c, s in rule.alpha.cells),
    )


def matches(grid: Grid, rule: Rule) -> list[Placement]:
    """Anchors (row-major) where alpha fits inside the window and matches exactly."""
    cr = _compile_one(rule)
    out = []
    for r in range(grid.rows - cr.height + 1):
        for c in range(grid.cols - cr.width + 1):
            if all(grid[(r + dr, c + dc)] == a for dr, dc, a, _ in cr.cells):
                out.append(Placement(rule.id, Coord(r, c)))
    return out


def apply(grid: Grid, placement: Placement, grammar: Grammar, config: EngineConfig | None = None) -> Grid:
    """Rewrite the cells under the placed rule; other cells are untouched.

    Raises :class:`MatchError` if alpha does not match there and
    :class:`C4RejectionError` if the result's support would be disconnected.
    """
    config = config or EngineConfig()
    rule = grammar.rule(placement.rule_id)
    anchor = Coord(*placement.anchor)
    updates = {}
    for coord, a in rule.alpha.cells:
        target = anchor + coord
        if not grid.in_bounds(target):
            raise MatchError(f"{placement}: rule shape leaves the window at {target}")
        if grid[target] != a:
            raise MatchError(f"{placement}: expected {a.name!r} at {target}, found {grid[target].name!r}")
        updates[target] = rule.beta.symbols[coord]
    result = grid.replace(updates)
    assert (result.rows, result.cols) == (grid.rows, grid.cols)
    if config.enforce_c4 and not is_connected(support(result), config.connectivity):
        raise C4RejectionError(f"{placement}: result {result} has a disconnected host array")
    return result


def legal_moves(grid: Grid, grammar: Grammar, config: EngineConfig | None = None) -> list[tuple[Placement, Grid]]:
    """Every (placement, result) that applies cleanly, ordered by (rule id, anchor)."""
    config = config or EngineConfig()
    out = []
    for rule in sorted(grammar.rules, key=lambda r: r.id):
        for p in matches(grid, rule):
            try:
                out.append((p, apply(grid, p, grammar, config)))
            except C4RejectionError:
                pass
    return out


def derive_random(
    grammar: Grammar,
    window: tuple[int, int],
    start: tuple[int, int],
    config: EngineConfig | None = None,
) -> DerivationTrace:
    """Apply uniformly chosen legal moves until the form is terminal or stuck.

    Choices come from ``random.Random(config.rng_seed)``: one
    ``randrange(len(moves))`` per step over the moves listed by
    :meth:`CompiledGrammar.successors`.
    """
    config = config or EngineConfig()
    rows, cols = window
    grid = initial_form(window, start, grammar)
    compiled = CompiledGrammar(grammar, rows, cols, config)
    rng = random.Random(config.rng_seed)
    key = grid.key()
    steps: list[Placement] = []
    limit = config.step_limit(rows, cols)
    reason = MAX_STEPS
    while len(steps) < limit:
        if compiled.is_terminal(key):
            reason = TERMINAL
            break
        moves = list(compiled.successors(key))
        if not moves:
            reason = NO_RULE
            break
        placement, key = moves[rng.randrange(len(moves))]
        steps.append(placement)
    else:
        if compiled.is_terminal(key):
            reason = TERMINAL
    final = Grid.from_key(rows, cols, key, grammar.symbol)
    return DerivationTrace(grammar.name, (rows, cols), Coord(*start), tuple(steps), final, reason)


def iter_forms(grammar: Grammar, trace: DerivationTrace, config: EngineConfig | None = None) -> Iterator[Grid]:
    """Yield the initial form and every form after each step, checking legality."""
    try:
        grid = initial_form(trace.window, trace.start, grammar)
    except IndexError as exc:
        raise ReplayError(0, str(exc)) from exc
    yield grid
    for i, placement in enumerate(trace.steps, 1):
        try:
            grammar.rule(placement.rule_id)
            grid = apply(grid, placement, grammar, config)
        except (KeyError, DerivationError) as exc:
            raise ReplayError(i, str(exc)) from exc
        yield grid


def replay(grammar: Grammar, trace: DerivationTrace, config: EngineConfig | None = None) -> Grid:
    """Re-run a trace and check it lands on ``trace.final``."""
    grid = None
    for grid in iter_forms(grammar, trace, config):
        pass
    if grid.key() != trace.final.key():
        raise IntegrityError(f"replay ended in {grid}, trace records {trace.final}")
    return grid
