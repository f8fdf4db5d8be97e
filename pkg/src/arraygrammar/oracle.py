"""Brute-force pattern census, grammar language enumeration, membership and coverage.

:func:`census` never touches a grammar: it enumerates binary windows and
keeps those whose grain set is connected. :func:`derivable_set` and
:func:`is_derivable` search the grammar's sentential forms. Comparing the
two (:func:`coverage_report`) is how the grammar is checked against the
patterns it is supposed to generate.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter, deque
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .engine import (
    TERMINAL,
    CompiledGrammar,
    DerivationTrace,
    EngineConfig,
    Placement,
    initial_form,
)
from .grammar import Grammar
from .grid import Coord, Grid, Pattern, is_connected, pattern_from_key

__all__ = [
    "DEFAULT_CAP",
    "CensusQuery",
    "CensusReport",
    "CoverageReport",
    "DerivableSet",
    "FeasibilityError",
    "Membership",
    "Verdict",
    "all_starts",
    "census",
    "center_cell",
    "coverage_report",
    "derivable_set",
    "is_derivable",
]

CENSUS_MAX_CELLS = 25
DEFAULT_CAP = 10**7

GRAIN_READING = "connected = grain (a) cells form one component; no grains counts as connected"
SUPPORT_READING = "derivations keep the non-blank support connected (condition C4)"


class FeasibilityError(ValueError):
    """Window too large for exhaustive enumeration."""


def center_cell(rows: int, cols: int) -> Coord:
    if rows % 2 == 0 or cols % 2 == 0:
        raise ValueError(f"a {rows}x{cols} window has no center cell")
    return Coord(rows // 2, cols // 2)


def all_starts(rows: int, cols: int) -> tuple[Coord, ...]:
    return tuple(Coord(r, c) for r in range(rows) for c in range(cols))


@dataclass(frozen=True)
class CensusQuery:
    window: tuple[int, int]
    connectivity: int = 8
    center_fixed: bool = False
    grain_count: int | None = None

    def __post_init__(self) -> None:
        rows, cols = self.window
        if rows < 1 or cols < 1:
            raise ValueError(f"bad window {rows}x{cols}")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if self.grain_count is not None and not 0 <= self.grain_count <= rows * cols:
            raise ValueError(f"grain_count must lie in 0..{rows * cols}")
        if self.center_fixed:
            center_cell(rows, cols)


@dataclass(frozen=True)
class CensusReport:
    query: CensusQuery
    count: int
    by_grains: dict[int, int]
    includes_empty: bool
    keys: tuple[int, ...] | None = None


def _census_chunk(query: CensusQuery, masks: Iterable[int]) -> list[int]:
    rows, cols = query.window
    n = rows * cols
    cells = [(i // cols, i % cols) for i in range(n)]
    out = []
    for key in masks:
        grains = [cells[i] for i in range(n) if (key >> (n - 1 - i)) & 1]
        if is_connected(grains, query.connectivity):
            out.append(key)
    return out


def _candidate_keys(query: CensusQuery) -> list[int]:
    rows, cols = query.window
    n = rows * cols
    fixed = None
    if query.center_fixed:
        c = center_cell(rows, cols)
        fixed = c.row * cols + c.col
    free = [i for i in range(n) if i != fixed]
    base = 0 if fixed is None else 1 << (n - 1 - fixed)
    if query.grain_count is None:
        sizes = range(len(free) + 1)
    else:
        k = query.grain_count - (fixed is not None)
        sizes = [k] if 0 <= k <= len(free) else []
    keys = []
    for k in sizes:
        for combo in itertools.combinations(free, k):
            key = base
            for i in combo:
                key |= 1 << (n - 1 - i)
            keys.append(key)
    return keys


def census(query: CensusQuery, *, materialize: bool = False, workers: int = 1) -> CensusReport:
    """Count binary windows whose grain set is connected.

    The center constraint and grain count narrow the candidates; each
    candidate is then tested with :func:`~arraygrammar.grid.is_connected`.
    ``workers`` splits the candidates across threads; output is identical
    for any value.
    """
    rows, cols = query.window
    if rows * cols > CENSUS_MAX_CELLS:
        raise FeasibilityError(f"{rows}x{cols} exceeds the {CENSUS_MAX_CELLS}-cell census bound")
    candidates = _candidate_keys(query)
    if workers <= 1 or len(candidates) < 2:
        found = _census_chunk(query, candidates)
    else:
        size = -(-len(candidates) // workers)
        chunks = [candidates[i:i + size] for i in range(0, len(candidates), size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = [k for part in pool.map(lambda ch: _census_chunk(query, ch), chunks) for k in part]
    found.sort()
    by_grains = Counter((k).bit_count() for k in found)
    return CensusReport(
        query=query,
        count=len(found),
        by_grains=dict(sorted(by_grains.items())),
        includes_empty=bool(found) and found[0] == 0,
        keys=tuple(found) if materialize else None,
    )


@dataclass(frozen=True)
class DerivableSet:
    keys: frozenset[int]
    visited: int
    search_exhausted: bool
    visited_by_start: dict[Coord, int] = field(default_factory=dict)
    blank_terminal_forms: int = 0  # terminal forms that still contain blanks

    def __len__(self) -> int:
        return len(self.keys)


def _terminal_pattern_key(key: str, grain: str, background: str) -> int | None:
    value = 0
    for ch in key:
        if ch == grain:
            value = (value << 1) | 1
        elif ch == background:
            value <<= 1
        else:
            return None
    return value


def _explore(compiled: CompiledGrammar, start: Coord, cap: int, grain: str, background: str):
    root = initial_form((compiled.rows, compiled.cols), start, compiled.grammar).key()
    seen = {root}
    queue = deque([root])
    keys: set[int] = set()
    blanks = 0
    exhausted = True
    while queue:
        form = queue.popleft()
        if compiled.is_terminal(form):
            k = _terminal_pattern_key(form, grain, background)
            if k is None:
                blanks += 1
            else:
                keys.add(k)
            continue
        for _, nxt in compiled.successors(form):
            if nxt not in seen:
                if len(seen) >= cap:
                    exhausted = False
                    break
                seen.add(nxt)
                queue.append(nxt)
        if not exhausted:
            break
    return keys, len(seen), exhausted, blanks


def derivable_set(
    grammar: Grammar,
    window: tuple[int, int],
    starts: Iterable[tuple[int, int]] | None = None,
    config: EngineConfig | None = None,
    *,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    grain: str = "a",
    background: str = "b",
) -> DerivableSet:
    """Keys of every all-terminal a/b window reachable from the given starts.

    Each start is a separate breadth-first search whose visited set is
    keyed by the full row-major form (blanks included) and bounded by *cap*.
    ``starts`` defaults to every cell of the window.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    rows, cols = window
    config = config or EngineConfig()
    starts = [Coord(*s) for s in (starts if starts is not None else all_starts(rows, cols))]
    compiled = CompiledGrammar(grammar, rows, cols, config)

    def run(s: Coord):
        return _explore(compiled, s, cap, grain, background)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    keys: set[int] = set()
    for k, _, _, _ in results:
        keys |= k
    return DerivableSet(
        keys=frozenset(keys),
        visited=sum(r[1] for r in results),
        search_exhausted=all(r[2] for r in results),
        visited_by_start={s: r[1] for s, r in zip(starts, results)},
        blank_terminal_forms=sum(r[3] for r in results),
    )


class Verdict(enum.Enum):
    DERIVABLE = "derivable"
    NOT_DERIVABLE = "not derivable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Membership:
    verdict: Verdict
    trace: DerivationTrace | None
    visited: int

    def __bool__(self) -> bool:
        return self.verdict is Verdict.DERIVABLE


def is_derivable(
    grammar: Grammar,
    window: tuple[int, int],
    target: Pattern | Grid,
    starts: Iterable[tuple[int, int]] | None = None,
    config: EngineConfig | None = None,
    *,
    cap: int = DEFAULT_CAP,
    prune: bool = True,
    grain: str = "a",
    background: str = "b",
) -> Membership:
    """Search for a derivation ending exactly in *target*.

    A :class:`Pattern` target means the a/b grid it maps to; a :class:`Grid`
    target may also contain blanks. With *prune*, forms holding a terminal
    that disagrees with the target are dropped: terminals are never
    rewritten, so such forms cannot reach it. Returns the shortest witness
    found from the first start (in row-major order) that has one.
    """
    rows, cols = window
    if (target.rows, target.cols) != (rows, cols):
        raise ValueError(f"target is {target.rows}x{target.cols}, window is {rows}x{cols}")
    goal = (target.to_grid(grain, background) if isinstance(target, Pattern) else target).key()
    config = config or EngineConfig()
    starts = [Coord(*s) for s in (starts if starts is not None else all_starts(rows, cols))]
    compiled = CompiledGrammar(grammar, rows, cols, config)
    terminals = frozenset(grammar.terminals)

    if any(ch in compiled.nonterminals for ch in goal):
        return Membership(Verdict.NOT_DERIVABLE, None, 0)

    def viable(form: str) -> bool:
        return all(ch == g or ch not in terminals for ch, g in zip(form, goal))

    visited = 0
    capped = False
    for start in starts:
        root = initial_form(window, start, grammar).key()
        parent: dict[str, tuple[str, Placement] | None] = {root: None}
        queue = deque([root])
        hit = root if root == goal else None
        while queue and hit is None:
            form = queue.popleft()
            for placement, nxt in compiled.successors(form):
                if nxt in parent or (prune and not viable(nxt)):
                    continue
                if len(parent) >= cap:
                    capped = True
                    queue.clear()
                    break
                parent[nxt] = (form, placement)
                if nxt == goal:
                    hit = nxt
                    break
                queue.append(nxt)
        visited += len(parent)
        if hit is not None:
            steps = []
            node = hit
            while parent[node] is not None:
                node, placement = parent[node]
                steps.append(placement)
            final = Grid.from_key(rows, cols, hit, grammar.symbol)
            trace = DerivationTrace(grammar.name, window, start, tuple(reversed(steps)), final, TERMINAL)
            return Membership(Verdict.DERIVABLE, trace, visited)
    return Membership(Verdict.INCONCLUSIVE if capped else Verdict.NOT_DERIVABLE, None, visited)


@dataclass(frozen=True)
class CoverageReport:
    window: tuple[int, int]
    connectivity: int
    center_fixed: bool
    derivable_not_connected: tuple[int, ...]
    connected_not_derivable: tuple[int, ...]
    derivable_count: int
    connected_count: int
    search_exhausted: bool
    visited: int
    readings: tuple[str, ...] = (GRAIN_READING, SUPPORT_READING)


def coverage_report(
    grammar: Grammar,
    window: tuple[int, int],
    connectivity: int = 8,
    config: EngineConfig | None = None,
    *,
    center_fixed: bool = False,
    starts: Iterable[tuple[int, int]] | None = None,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> CoverageReport:
    """Compare the grammar's derivable windows with the census of connected ones.

    With *center_fixed*, both sides are restricted to windows whose center
    cell is a grain.
    """
    rows, cols = window
    config = config or EngineConfig(connectivity=connectivity)
    found = census(CensusQuery(window, connectivity, center_fixed), materialize=True, workers=workers)
    connected = set(found.keys)
    derived = derivable_set(grammar, window, starts, config, cap=cap, workers=workers)
    keys = set(derived.keys)
    if center_fixed:
        c = center_cell(rows, cols)
        keys = {k for k in keys if pattern_from_key(k, rows, cols)[c]}
    return CoverageReport(
        window=(rows, cols),
        connectivity=connectivity,
        center_fixed=center_fixed,
        derivable_not_connected=tuple(sorted(keys - connected)),
        connected_not_derivable=tuple(sorted(connected - keys)),
        derivable_count=len(keys),
        connected_count=len(connected),
        search_exhausted=derived.search_exhausted,
        visited=derived.visited,
    )
