"""Symbols, rectangular windows, connectivity and binary patterns.

Everything here is immutable. A :class:`Grid` is a fixed ``rows x cols``
window of :class:`Symbol` values stored row-major; rewriting produces new
grids rather than mutating old ones.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "BLANK",
    "Coord",
    "DimensionError",
    "EncodingOverflowError",
    "Grid",
    "Kind",
    "NonTerminalArrayError",
    "Pattern",
    "PatternFormatError",
    "Symbol",
    "is_connected",
    "neighbours",
    "new_grid",
    "nonterminal",
    "normalize_shape",
    "pattern_from_key",
    "pattern_key",
    "read_grid",
    "read_pattern",
    "render_pbm",
    "support",
    "terminal",
    "to_pattern",
]

MAX_KEY_CELLS = 62


class DimensionError(ValueError):
    """A window dimension is not a positive integer."""


class NonTerminalArrayError(ValueError):
    """A grid that should hold only ``a``/``b`` terminals holds something else."""

    def __init__(self, coord: Coord, symbol: Symbol):
        self.coord = coord
        self.symbol = symbol
        super().__init__(
            f"cell ({coord.row},{coord.col}) holds {symbol.kind.value} {symbol.name!r}, "
            "expected terminal 'a' or 'b'"
        )


class EncodingOverflowError(ValueError):
    """Window too large for an integer pattern key."""


class PatternFormatError(ValueError):
    """Malformed pattern or grid text."""


class Kind(enum.Enum):
    BLANK = "blank"
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"


@dataclass(frozen=True, slots=True)
class Symbol:
    """One cell value: the blank, a terminal or a nonterminal.

    Symbols compare by kind *and* name, so the blank never equals a
    terminal even if someone names a terminal ``'#'``.
    """

    kind: Kind
    name: str

    def __post_init__(self) -> None:
        if len(self.name) != 1 or not self.name.isprintable() or self.name.isspace():
            raise ValueError(f"symbol names are single printable characters, got {self.name!r}")

    @property
    def is_blank(self) -> bool:
        return self.kind is Kind.BLANK

    @property
    def is_terminal(self) -> bool:
        return self.kind is Kind.TERMINAL

    @property
    def is_nonterminal(self) -> bool:
        return self.kind is Kind.NONTERMINAL

    def __str__(self) -> str:
        return self.name


BLANK = Symbol(Kind.BLANK, "#")


def terminal(name: str) -> Symbol:
    return Symbol(Kind.TERMINAL, name)


def nonterminal(name: str) -> Symbol:
    return Symbol(Kind.NONTERMINAL, name)


class Coord(NamedTuple):
    row: int
    col: int

    def __add__(self, other):  # type: ignore[override]
        return Coord(self.row + other[0], self.col + other[1])

    def __str__(self) -> str:
        return f"({self.row},{self.col})"


def normalize_shape(coords: Iterable[tuple[int, int]]) -> frozenset[Coord]:
    """Translate a coordinate set so its minimum row and column are 0."""
    coords = [Coord(*c) for c in coords]
    if not coords:
        raise ValueError("a shape needs at least one coordinate")
    r0 = min(c.row for c in coords)
    c0 = min(c.col for c in coords)
    return frozenset(Coord(c.row - r0, c.col - c0) for c in coords)


def _default_resolve(ch: str) -> Symbol:
    if ch == "#":
        return BLANK
    if ch.isupper():
        return nonterminal(ch)
    return terminal(ch)


@dataclass(frozen=True, slots=True)
class Grid:
    """A fixed-size window of symbols, row-major."""

    rows: int
    cols: int
    cells: tuple[Symbol, ...]

    def __post_init__(self) -> None:
        _check_dims(self.rows, self.cols)
        if len(self.cells) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} grid needs {self.rows * self.cols} cells, "
                f"got {len(self.cells)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Symbol]]) -> Grid:
        rows = [tuple(r) for r in rows]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("rows must be nonempty and of equal length")
        return cls(len(rows), len(rows[0]), tuple(s for r in rows for s in r))

    @classmethod
    def from_key(
        cls, rows: int, cols: int, key: str, resolve: Callable[[str], Symbol] | None = None
    ) -> Grid:
        """Rebuild a grid from its row-major name string (see :meth:`key`)."""
        resolve = resolve or _default_resolve
        return cls(rows, cols, tuple(resolve(ch) for ch in key))

    def __getitem__(self, coord: tuple[int, int]) -> Symbol:
        r, c = coord
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r},{c}) is outside the {self.rows}x{self.cols} window")
        return self.cells[r * self.cols + c]

    def in_bounds(self, coord: tuple[int, int]) -> bool:
        return 0 <= coord[0] < self.rows and 0 <= coord[1] < self.cols

    def coords(self) -> Iterable[Coord]:
        for r in range(self.rows):
            for c in range(self.cols):
                yield Coord(r, c)

    def replace(self, updates: Mapping[tuple[int, int], Symbol]) -> Grid:
        cells = list(self.cells)
        for (r, c), sym in updates.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"({r},{c}) is outside the {self.rows}x{self.cols} window")
            cells[r * self.cols + c] = sym
        return Grid(self.rows, self.cols, tuple(cells))

    def key(self) -> str:
        """Row-major concatenation of symbol names, blanks included."""
        return "".join(s.name for s in self.cells)

    def row_strings(self) -> list[str]:
        return [
            " ".join(s.name for s in self.cells[r * self.cols:(r + 1) * self.cols])
            for r in range(self.rows)
        ]

    def to_text(self) -> str:
        return "\n".join(self.row_strings())

    def __str__(self) -> str:
        return " / ".join(self.row_strings())

    @property
    def has_nonterminal(self) -> bool:
        return any(s.is_nonterminal for s in self.cells)


def _check_dims(rows: int, cols: int) -> None:
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise DimensionError(f"window dimensions must be positive integers, got {rows}x{cols}")


def new_grid(rows: int, cols: int, fill: Symbol = BLANK) -> Grid:
    _check_dims(rows, cols)
    return Grid(rows, cols, (fill,) * (rows * cols))


def support(grid: Grid) -> frozenset[Coord]:
    """Coordinates of the non-blank cells (the host array)."""
    return frozenset(c for c, s in zip(grid.coords(), grid.cells) if not s.is_blank)


_OFFSETS = {
    4: ((-1, 0), (0, -1), (0, 1), (1, 0)),
    8: ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


def _check_connectivity(connectivity: int) -> None:
    if connectivity not in _OFFSETS:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity!r}")


def is_connected(coords: Iterable[tuple[int, int]], connectivity: int = 8) -> bool:
    """True if the cells form a single component; empty and singleton sets count."""
    _check_connectivity(connectivity)
    cells = {(r, c) for r, c in coords}
    if len(cells) <= 1:
        return True
    offsets = _OFFSETS[connectivity]
    first = next(iter(cells))
    seen = {first}
    queue = deque([first])
    while queue:
        r, c = queue.popleft()
        for dr, dc in offsets:
            n = (r + dr, c + dc)
            if n in cells and n not in seen:
                seen.add(n)
                queue.append(n)
    return len(seen) == len(cells)


@lru_cache(maxsize=64)
def neighbours(rows: int, cols: int, connectivity: int) -> tuple[tuple[int, ...], ...]:
    """Flat-index adjacency lists for a window; used by the search hot paths."""
    _check_connectivity(connectivity)
    out = []
    for r in range(rows):
        for c in range(cols):
            out.append(tuple(
                (r + dr) * cols + (c + dc)
                for dr, dc in _OFFSETS[connectivity]
                if 0 <= r + dr < rows and 0 <= c + dc < cols
            ))
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Pattern:
    """A binary window: 1 is a grain, 0 is background."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_dims(self.rows, self.cols)
        if len(self.bits) != self.rows * self.cols:
            raise ValueError(f"{self.rows}x{self.cols} pattern needs {self.rows * self.cols} bits")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("pattern bits must be 0 or 1")

    @classmethod
    def from_array(cls, array) -> Pattern:
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(arr.shape[0], arr.shape[1], tuple(int(bool(v)) for v in arr.ravel()))

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8).reshape(self.rows, self.cols)

    def __getitem__(self, coord: tuple[int, int]) -> int:
        r, c = coord
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r},{c}) is outside the {self.rows}x{self.cols} window")
        return self.bits[r * self.cols + c]

    def grains(self) -> frozenset[Coord]:
        return frozenset(
            Coord(i // self.cols, i % self.cols) for i, b in enumerate(self.bits) if b
        )

    def to_grid(self, grain: str = "a", background: str = "b") -> Grid:
        """Inverse of :func:`to_pattern`: 1 becomes ``a``, 0 becomes ``b``."""
        sym = {1: terminal(grain), 0: terminal(background)}
        return Grid(self.rows, self.cols, tuple(sym[b] for b in self.bits))

    def to_text(self, alphabet: str = "01") -> str:
        return "\n".join(
            "".join(alphabet[b] for b in self.bits[r * self.cols:(r + 1) * self.cols])
            for r in range(self.rows)
        )

    def __str__(self) -> str:
        return self.to_text()


def to_pattern(grid: Grid, grain: str = "a", background: str = "b") -> Pattern:
    bits = []
    for coord, sym in zip(grid.coords(), grid.cells):
        if sym.is_terminal and sym.name == grain:
            bits.append(1)
        elif sym.is_terminal and sym.name == background:
            bits.append(0)
        else:
            raise NonTerminalArrayError(coord, sym)
    return Pattern(grid.rows, grid.cols, tuple(bits))


def pattern_key(pattern: Pattern) -> int:
    """Row-major base-2 encoding with cell (0,0) as the most significant bit."""
    if pattern.rows * pattern.cols > MAX_KEY_CELLS:
        raise EncodingOverflowError(
            f"{pattern.rows}x{pattern.cols} window exceeds {MAX_KEY_CELLS} cells"
        )
    key = 0
    for b in pattern.bits:
        key = (key << 1) | b
    return key


def pattern_from_key(key: int, rows: int, cols: int) -> Pattern:
    _check_dims(rows, cols)
    n = rows * cols
    if n > MAX_KEY_CELLS:
        raise EncodingOverflowError(f"{rows}x{cols} window exceeds {MAX_KEY_CELLS} cells")
    if not 0 <= key < (1 << n):
        raise ValueError(f"key {key} out of range for a {rows}x{cols} window (0..{(1 << n) - 1})")
    return Pattern(rows, cols, tuple((key >> (n - 1 - i)) & 1 for i in range(n)))


def _text_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln.removesuffix("\r") for ln in lines]
    if not lines:
        raise PatternFormatError("empty input")
    return lines


def read_pattern(text: str) -> Pattern:
    """Parse the compact pattern format: rows of ``0``/``1`` or of ``a``/``b``."""
    lines = _text_lines(text)
    chars = set("".join(lines))
    if chars <= {"0", "1"}:
        mapping = {"0": 0, "1": 1}
    elif chars <= {"a", "b"}:
        mapping = {"b": 0, "a": 1}
    elif chars <= {"0", "1", "a", "b"}:
        raise PatternFormatError("mixed 0/1 and a/b alphabets")
    else:
        bad = sorted(chars - {"0", "1", "a", "b"})
        raise PatternFormatError(f"unexpected characters {''.join(bad)!r}")
    width = len(lines[0])
    for i, ln in enumerate(lines, 1):
        if not ln:
            raise PatternFormatError(f"line {i} is empty")
        if len(ln) != width:
            raise PatternFormatError(f"line {i} has {len(ln)} cells, expected {width}")
    return Pattern(len(lines), width, tuple(mapping[ch] for ln in lines for ch in ln))


def read_grid(text: str, resolve: Callable[[str], Symbol] | None = None) -> Grid:
    """Parse the spaced grid format, e.g. ``"b A #\\n# # #"``.

    Without *resolve*, ``#`` is the blank, uppercase letters are nonterminals
    and anything else is a terminal.
    """
    resolve = resolve or _default_resolve
    lines = _text_lines(text)
    rows = []
    for i, ln in enumerate(lines, 1):
        tokens = ln.split(" ")
        if any(len(t) != 1 for t in tokens):
            raise PatternFormatError(f"line {i}: cells must be single characters separated by single spaces")
        try:
            rows.append([resolve(t) for t in tokens])
        except (KeyError, ValueError) as exc:
            raise PatternFormatError(f"line {i}: {exc}") from None
    if len({len(r) for r in rows}) != 1:
        raise PatternFormatError("rows have different lengths")
    return Grid.from_rows(rows)


def render_pbm(pattern: Pattern) -> str:
    """Plain PBM (P1) text; grain pixels are 1, i.e. black."""
    body = [
        " ".join(str(b) for b in pattern.bits[r * pattern.cols:(r + 1) * pattern.cols])
        for r in range(pattern.rows)
    ]
    return "\n".join(["P1", f"{pattern.cols} {pattern.rows}", *body]) + "\n"
