"""Isometric array grammars on small image windows.

The Connected Pattern Array Grammar is available as :func:`builtin_cpag`.
"""

from .dsl import GrammarSyntaxError, load_grammar, parse_grammar, serialize_grammar
from .engine import (
    DerivationTrace,
    EngineConfig,
    Placement,
    apply,
    derive_random,
    initial_form,
    matches,
    read_trace,
    replay,
)
from .grammar import (
    Grammar,
    Rule,
    RuleSide,
    builtin_cpag,
    is_context_free,
    validate_grammar,
)
from .grid import (
    BLANK,
    Coord,
    Grid,
    Pattern,
    is_connected,
    new_grid,
    nonterminal,
    pattern_from_key,
    pattern_key,
    read_grid,
    read_pattern,
    support,
    terminal,
    to_pattern,
)
from .oracle import (
    CensusQuery,
    Verdict,
    census,
    coverage_report,
    derivable_set,
    is_derivable,
)

__version__ = "0.1.0"

__all__ = [
    "BLANK",
    "CensusQuery",
    "Coord",
    "DerivationTrace",
    "EngineConfig",
    "Grammar",
    "GrammarSyntaxError",
    "Grid",
    "Pattern",
    "Placement",
    "Rule",
    "RuleSide",
    "Verdict",
    "apply",
    "builtin_cpag",
    "census",
    "coverage_report",
    "derivable_set",
    "derive_random",
    "initial_form",
    "is_connected",
    "is_context_free",
    "is_derivable",
    "load_grammar",
    "matches",
    "new_grid",
    "nonterminal",
    "parse_grammar",
    "pattern_from_key",
    "pattern_key",
    "read_grid",
    "read_pattern",
    "read_trace",
    "replay",
    "serialize_grammar",
    "support",
    "terminal",
    "to_pattern",
    "validate_grammar",
]
