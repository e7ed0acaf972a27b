"""
Rainbow matchings in a family of hypergraphs
============================================

Given hypergraphs ``H_0, ..., H_{t-1}`` on the same vertex classes, a rainbow
matching picks at most one edge from each member so that the picked edges
are disjoint. Each algorithm here is checked against the exact optimum.
"""

from fractions import Fraction

from hypermatch.constructions import complete, space_barrier
from hypermatch.family import HypergraphFamily, validate_rainbow
from hypermatch.oracles import max_rainbow_matching_exact
from hypermatch.rainbow import (
    almost_perfect_rainbow,
    pokrovskiy_rainbow,
    rainbow_m_plus_q,
    rainbow_or_dominating,
)

# Six complete members: ask for 1 + 3 edges and insist that colour 5 appears.
F = HypergraphFamily(tuple(complete(3, 8) for _ in range(6)))
res = almost_perfect_rainbow(F, (1, 0, 0), 3, [5])
print("almost perfect:", res.matching, res.status)

# Identical covering barriers cannot host a rainbow matching with every
# colour, and each member is certified by a small dominating set instead.
H = space_barrier(3, 6, (1, 1, 1)).graph
out = rainbow_or_dominating(HypergraphFamily((H,) * 3), (1, 1, 1), Fraction(1, 10))
print("barrier family:", out.kind, {j: D for j, D in out.dominating_sets.items()})

# A mixed family where the last member is sparse.
G = HypergraphFamily((complete(3, 12), space_barrier(3, 12, (2, 0, 0)).graph))
for name, run in [("m + Q", lambda: rainbow_m_plus_q(G, (2, 0, 0), 0)),
                  ("recursive", lambda: pokrovskiy_rainbow(G, (2, 0, 0)))]:
    res = run()
    print(f"{name}: size {res.achieved}/{res.target}, valid {validate_rainbow(G, res.matching)[0]}")
print("optimum:", max_rainbow_matching_exact(G).value)
