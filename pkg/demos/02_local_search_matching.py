"""
Growing a matching by local moves
=================================

A greedy maximal matching can be far from maximum. Removing one edge and
adding two disjoint ones is enough to reach ``min(n - k + 2, a1 + ... + ak)``
whenever every codegree is at least the corresponding ``ai``.
"""

from fractions import Fraction

from hypermatch.constructions import fact_1_5_matching, random_instance, space_barrier
from hypermatch.core import greedy_matching, validate_matching

# Greedy takes (0,0,0) first and uses up all three marked vertices at once.
H = space_barrier(3, 4, (1, 1, 1)).graph
print("greedy:", greedy_matching(H))
M = fact_1_5_matching(H, H.codegree_profile())
print("after local moves:", M, "valid:", validate_matching(H, M)[0])

# The same matcher on seeded random instances, sized by their own codegrees.
for seed in range(5):
    H = random_instance(3, 5, (1, 1, 0), Fraction(1, 5), seed).graph
    a = H.codegree_profile()
    M = fact_1_5_matching(H, a)
    print(f"seed {seed}: codegrees {a}, target {min(5 - 3 + 2, sum(a))}, found {len(M)}")
