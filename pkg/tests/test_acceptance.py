"""Exit criteria for the package, one test (or group) per criterion.

Run ``pytest tests/test_acceptance.py`` to get the PASS/FAIL table in the
terminal summary.
"""

import itertools
import json
import time
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arraygrammar.cli import main
from arraygrammar.dsl import GrammarSyntaxError, parse_grammar, serialize_grammar
from arraygrammar.engine import EngineConfig, derive_random, iter_forms, replay
from arraygrammar.grammar import is_context_free, validate_grammar
from arraygrammar.grid import (
    Pattern,
    is_connected,
    pattern_from_key,
    read_grid,
    support,
    to_pattern,
)
from arraygrammar.oracle import (
    CensusQuery,
    Verdict,
    census,
    derivable_set,
    is_derivable,
)

criterion = pytest.mark.criterion


class timed:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@criterion(1, "census 3x3 8-conn center-fixed: 2 grains -> 8, 3 grains -> 28")
def test_c01_census_reproduction():
    with timed(1.0):
        assert census(CensusQuery((3, 3), 8, True, 2)).count == 8
    with timed(1.0):
        assert census(CensusQuery((3, 3), 8, True, 3)).count == 28


@criterion(2, "forced totals: unconstrained center-fixed = 256, 4-conn 2 grains = 4")
def test_c02_forced_totals():
    assert census(CensusQuery((3, 3), 8, True)).count == 256
    assert census(CensusQuery((3, 3), 4, True, 2)).count == 4


ONE_GRAIN_FORMS = [
    "S # # / # # # / # # #",
    "b A # / # # # / # # #",
    "b b A / # # # / # # #",
]
DIAGONAL_TAIL = [
    "b b a / # # A / # # #",
    "b b a / # A b / # # #",
    "b b a / A a b / # # #",
    "b b a / b a b / A # #",
    "b b a / b a b / b A #",
    "b b a / b a b / b b A",
    "b b a / b a b / b b b",
]


@criterion(3, "fixture traces replay every intermediate form of the worked derivations")
def test_c03_paper_replay(cpag, fixture_trace):
    with timed(1.0):
        center = [str(f) for f in iter_forms(cpag, fixture_trace("center_grain"))]
        assert center[:3] == ONE_GRAIN_FORMS
        assert center[-1] == "b b b / b a b / b b b"
        assert str(replay(cpag, fixture_trace("center_grain"))) == center[-1]

        diagonal = [str(f) for f in iter_forms(cpag, fixture_trace("diagonal_pair"))]
        assert diagonal[:3] == ONE_GRAIN_FORMS
        assert diagonal[3:] == DIAGONAL_TAIL
        assert str(replay(cpag, fixture_trace("diagonal_pair"))) == DIAGONAL_TAIL[-1]


@criterion(4, "builtin CPAG: zero C1/C2/C3 violations, every rule context-free")
def test_c04_classification(cpag):
    report = validate_grammar(cpag)
    assert [v for v in report.violations if v.condition in ("C1", "C2", "C3")] == []
    assert report.ok
    assert len(cpag.rules) == 23
    assert all(is_context_free(r) for r in cpag.rules)


@pytest.fixture(scope="module")
def corpus(cpag):
    """1008 seeded 3x3 derivations: 112 seeds from each of the 9 start cells."""
    config = EngineConfig(connectivity=8, enforce_c4=True)
    t0 = time.perf_counter()
    traces = []
    for seed in range(112):
        for start in [(r, c) for r in range(3) for c in range(3)]:
            cfg = EngineConfig(connectivity=8, rng_seed=seed * 9 + start[0] * 3 + start[1])
            traces.append(derive_random(cpag, (3, 3), start, cfg))
    forms = [list(iter_forms(cpag, t, config)) for t in traces]
    return traces, forms, time.perf_counter() - t0


@criterion(5, ">=1000 random 3x3 derivations keep connected support and window size")
def test_c05_condition_four(corpus):
    traces, forms, elapsed = corpus
    assert len(traces) >= 1000
    assert elapsed < 10.0
    violations = 0
    for seq in forms:
        for grid in seq:
            if (grid.rows, grid.cols) != (3, 3) or not is_connected(support(grid), 8):
                violations += 1
    assert violations == 0
    # guard against a degenerate corpus (start (2,2) is always stuck at zero steps)
    assert sum(len(t.steps) for t in traces) > len(traces)


@criterion(6, "terminal permanence over the same corpus")
def test_c06_terminal_permanence(corpus):
    _, forms, _ = corpus
    violations = 0
    for seq in forms:
        for before, after in itertools.pairwise(seq):
            for a, b in zip(before.cells, after.cells):
                if a.is_terminal and a != b:
                    violations += 1
    assert violations == 0


@criterion(7, "membership: center grain and key 80 derivable with witnesses; 'a # a' definite no")
def test_c07_membership(cpag):
    with timed(5.0):
        center = Pattern(3, 3, (0, 0, 0, 0, 1, 0, 0, 0, 0))
        r = is_derivable(cpag, (3, 3), center)
        assert r.verdict is Verdict.DERIVABLE
        assert to_pattern(replay(cpag, r.trace)) == center

        r = is_derivable(cpag, (3, 3), pattern_from_key(80, 3, 3))
        assert r.verdict is Verdict.DERIVABLE
        assert str(replay(cpag, r.trace)) == "b b a / b a b / b b b"

        r = is_derivable(cpag, (1, 3), read_grid("a # a"))
        assert r.verdict is Verdict.NOT_DERIVABLE


MICRO_WINDOWS = [(r, c) for r in range(1, 7) for c in range(1, 7) if r * c <= 6]


@criterion(8, "is_derivable agrees with derivable_set on every window with <= 6 cells")
def test_c08_micro_agreement(cpag):
    with timed(60.0):
        checked = 0
        for rows, cols in MICRO_WINDOWS:
            found = derivable_set(cpag, (rows, cols))
            assert found.search_exhausted
            for key in range(2 ** (rows * cols)):
                r = is_derivable(cpag, (rows, cols), pattern_from_key(key, rows, cols))
                assert r.verdict is not Verdict.INCONCLUSIVE
                assert (r.verdict is Verdict.DERIVABLE) == (key in found.keys), (rows, cols, key)
                checked += 1
        assert checked == sum(2 ** (r * c) for r, c in MICRO_WINDOWS)


@criterion(9, "DSL: builtin round-trips, shipped cpag.iag matches, fuzz yields positioned diagnostics")
def test_c09_dsl_round_trip(cpag, cpag_text):
    assert parse_grammar(serialize_grammar(cpag)).structurally_equal(cpag)
    assert parse_grammar(cpag_text).structurally_equal(cpag)


_pieces = st.sampled_from([
    "@grammar g", "@nonterminals S A", "@terminals a b", "@start S", "@rule R", "@end",
    "=>", "/", "S #", "a A", "A", "# .", "@blank #", "x", "", "A  b", "@", ";",
])


@criterion(9, "DSL: builtin round-trips, shipped cpag.iag matches, fuzz yields positioned diagnostics")
@settings(max_examples=300, deadline=None)
@given(st.one_of(st.text(max_size=120), st.lists(_pieces, max_size=20).map("\n".join)))
def test_c09_dsl_fuzz(text):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            parse_grammar(text)
        except GrammarSyntaxError as exc:
            lines = text.split("\n")
            if len(lines) > 1 and lines[-1] == "":
                lines.pop()
            assert exc.diagnostics
            for d in exc.diagnostics:
                assert 1 <= d.pos.line <= max(1, len(lines))
                assert 1 <= d.pos.col <= len(lines[d.pos.line - 1].rstrip("\r")) + 1


@criterion(10, "3x3 coverage via the CLI: exhausted, both lists, deterministic across runs/threads")
def test_c10_coverage(capsys):
    with timed(300.0):
        outputs = []
        for threads in ("1", "1", "4"):
            code = main(["enumerate", "--builtin", "cpag", "--window", "3x3", "--coverage",
                         "--format", "json", "--threads", threads])
            out = capsys.readouterr().out
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1] == outputs[2]
        doc = json.loads(outputs[0])
        assert doc["search_exhausted"] is True
        assert isinstance(doc["derivable_not_connected"], list)
        assert isinstance(doc["connected_not_derivable"], list)
        assert doc["derivable_not_connected_count"] == len(doc["derivable_not_connected"])
        assert doc["connected"] == 389
