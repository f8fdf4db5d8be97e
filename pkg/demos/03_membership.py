"""
Is a pattern derivable?
=======================

Membership is decided by searching the grammar's sentential forms. A
successful search returns a witness trace that can be replayed; a capped
search says so instead of answering no.
"""

from arraygrammar import Pattern, builtin_cpag, is_derivable, read_grid, replay
from arraygrammar.grid import pattern_from_key

cpag = builtin_cpag()

center = Pattern(3, 3, (0, 0, 0, 0, 1, 0, 0, 0, 0))
result = is_derivable(cpag, (3, 3), center)
print(result.verdict.value, "after visiting", result.visited, "forms")
print(result.trace.to_text())

diag = pattern_from_key(80, 3, 3)
result = is_derivable(cpag, (3, 3), diag, starts=[(0, 0)])
print("key 80 from the corner:", result.verdict.value)
print(replay(cpag, result.trace))

# A grid with a blank gap can never be reached: every derivation keeps its
# non-blank cells connected.
print("a # a:", is_derivable(cpag, (1, 3), read_grid("a # a")).verdict.value)

# With a tiny budget the answer is honest about not knowing.
print("budget 5:", is_derivable(cpag, (3, 3), diag, cap=5).verdict.value)
