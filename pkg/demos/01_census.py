"""
Counting connected patterns on a 3x3 neighborhood
=================================================

Fix the center pixel as a grain and count the ways to place the other
grains so that all grains stay connected. Nothing here uses a grammar: the
census enumerates every binary window by brute force.
"""

from arraygrammar import CensusQuery, census, pattern_from_key

# Two grains, one of them the center: the other can sit on any of the 8
# neighbors, all of which touch the center under 8-adjacency.
two = census(CensusQuery((3, 3), connectivity=8, center_fixed=True, grain_count=2), materialize=True)
print("two grains:", two.count)
for key in two.keys[:3]:
    print(pattern_from_key(key, 3, 3), end="\n\n")

# Three grains: choose 2 of the 8 neighbors, and every choice is connected
# through the center.
print("three grains:", census(CensusQuery((3, 3), 8, True, 3)).count)

# Under 4-adjacency only the edge neighbors touch the center.
print("two grains, 4-connected:", census(CensusQuery((3, 3), 4, True, 2)).count)

# The breakdown over grain counts sums to 2**8.
everything = census(CensusQuery((3, 3), 8, True))
print("by grain count:", everything.by_grains, "total", everything.count)

# Dropping the center constraint, the empty window is counted as connected
# and flagged so it can be excluded.
free = census(CensusQuery((3, 3), 8))
print("unconstrained:", free.count, "includes empty:", free.includes_empty)
