"""
Two ways to block a perfect matching
====================================

Both constructions below have large minimum codegree in every direction and
still have no perfect matching. The exact oracle confirms the matching number
in each case.
"""

from hypermatch.constructions import divisibility_barrier, space_barrier
from hypermatch.oracles import max_matching_exact

# A parity obstruction: keep exactly the tuples that meet the marked sets an
# even number of times. The marked sets have odd total size, so a perfect
# matching would have to meet them an odd number of times.
barrier = divisibility_barrier(3, 4)
H = barrier.graph
print("divisibility barrier, marked set sizes", barrier.params["sizes"])
print("  edges:", H.num_edges(), "of", 4 ** 3)
print("  codegrees:", H.codegree_profile())
print("  matching number:", max_matching_exact(H).value)

# A covering obstruction: keep the tuples that meet a small marked set.
# Every edge uses a marked vertex, so no matching is larger than that set.
for a in [(1, 1, 1), (2, 1, 0), (3, 1, 1)]:
    H = space_barrier(3, 5, a).graph
    print(f"space barrier a={a}: codegrees {H.codegree_profile()}, "
          f"matching number {max_matching_exact(H).value}")
