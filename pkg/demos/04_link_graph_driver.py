"""
Matchings of size min(n, Q) through link graphs
===============================================

When ``Q = a1 + ... + ak`` is close to ``n`` the local-search matcher is not
enough. The driver takes links of first-class vertices, finds a rainbow
matching among some of them and joins everything with one bipartite matching.
The report trace shows every stage.
"""

import json

from hypermatch.constructions import complete, space_barrier
from hypermatch.driver import DriverConfig, theorem_1_7
from hypermatch.oracles import max_matching_exact

H = space_barrier(3, 5, (3, 1, 1)).graph
rep = theorem_1_7(H, (3, 1, 1))
print("branch:", rep.branch, "status:", rep.status)
print("matching:", rep.matching, "oracle:", max_matching_exact(H).value)
for stage in rep.trace:
    print("  ", json.dumps(stage))

# Both branches can be forced on a small instance for inspection.
for branch in ("large_q", "small_q"):
    rep = theorem_1_7(complete(3, 6), (2, 2, 2), DriverConfig(force_branch=branch))
    print(branch, "->", len(rep.matching), "edges,", rep.status)
