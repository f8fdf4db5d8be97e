"""
Deriving patterns with the connected pattern array grammar
==========================================================

Replays a hand-written derivation step by step, then runs seeded random
derivations. Every rewrite keeps the window size and the connectivity of
the non-blank cells.
"""

from importlib import resources

from arraygrammar import EngineConfig, builtin_cpag, derive_random, read_trace
from arraygrammar.engine import iter_forms

cpag = builtin_cpag()
for rule in cpag.rules[:5]:
    print(rule)
print("...", len(cpag.rules), "rules in total\n")

# A shipped trace: S in the corner, A sweeps the window row by row.
text = (resources.files("arraygrammar") / "data" / "traces" / "diagonal_pair.trace").read_text()
trace = read_trace(text, cpag)
for step, form in zip((None,) + trace.steps, iter_forms(cpag, trace)):
    print(f"{step or 'start'!s:>14}   {form}")

# Random derivations are reproducible from the seed.
for seed in range(3):
    t = derive_random(cpag, (3, 3), (1, 1), EngineConfig(rng_seed=seed))
    print(f"\nseed {seed}: {len(t.steps)} steps, {t.reason}")
    print(t.final.to_text())
