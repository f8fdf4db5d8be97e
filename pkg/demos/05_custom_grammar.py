"""
Writing your own grammar
========================

Grammars are plain text. This one lets A snake right, down and left while
only ever writing grains, so the one filled window it can produce is all
``a``. Runs that stop early leave blanks and are not counted as patterns.
"""

from arraygrammar import (
    derivable_set,
    parse_grammar,
    serialize_grammar,
    validate_grammar,
)
from arraygrammar.grid import pattern_from_key

SOURCE = """\
; grains only
@grammar snake
@nonterminals S A
@terminals a b
@start S
@rule right
S #
=>
a A
@end
@rule down
A
#
=>
a
A
@end
@rule left
# A
=>
A a
@end
@rule stop
A
=>
a
@end
"""

g = parse_grammar(SOURCE)
print("violations:", validate_grammar(g).violations)
found = derivable_set(g, (2, 2), starts=[(0, 0)])
print("keys:", sorted(found.keys), "exhausted:", found.search_exhausted)
print("terminal forms with blanks left:", found.blank_terminal_forms)
for key in sorted(found.keys):
    print(pattern_from_key(key, 2, 2))

# Serialization is stable and re-parses to the same grammar.
print()
print(serialize_grammar(g))
