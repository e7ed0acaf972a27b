"""
Exact exponential-time reference solvers.

Every solver takes an :class:`OracleBudget`; running out of budget yields a
result with ``exact=False`` carrying the best witness found, never a
silently wrong optimum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .core import DegreeProfile, KPartiteHypergraph, greedy_matching
from .errors import InvalidInput

__all__ = [
    "OracleBudget",
    "OracleResult",
    "max_matching_exact",
    "max_rainbow_matching_exact",
    "min_dominating_set_exact",
    "is_dominating",
    "verify_theorem_bound",
]


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 2_000_000
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise InvalidInput("budget limits must be positive")


class _Exhausted(Exception):
    pass


class _Meter:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.max_seconds

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _Exhausted
        if self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _Exhausted


@dataclass
class OracleResult:
    """``value`` is optimal when ``exact``; otherwise it is the best found."""

    value: object
    witness: object
    exact: bool
    nodes: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "exact" if self.exact else "unknown"


def _vertex_bits(H: KPartiteHypergraph, first_class: int):
    bit = {}
    for c in range(first_class, H.k):
        for p in range(H.class_sizes[c]):
            bit[(c, p)] = 1 << len(bit)
    return bit


def max_matching_exact(H: KPartiteHypergraph, budget: OracleBudget = OracleBudget()) -> OracleResult:
    """Matching number by branch and bound over class-0 vertices.

    Each class-0 vertex is either matched through one of its edges or
    skipped. Subproblems ``(next class-0 vertex, used vertices)`` are
    memoised, and a branch stops as soon as it reaches the per-class count
    of remaining free vertices.
    """
    meter = _Meter(budget)
    greedy = greedy_matching(H)
    if H.k == 0 or not H.edges:
        return OracleResult(0, [], True, 0)
    order = H.alive(0)
    bit = _vertex_bits(H, 1)
    by_first = {p: [] for p in order}
    for e in H.edges:
        mask = 0
        for c in range(1, H.k):
            mask |= bit[(c, e[c])]
        by_first[e[0]].append((e, mask))
    class_masks = []
    for c in range(1, H.k):
        m = 0
        for p in H.alive(c):
            m |= bit[(c, p)]
        class_masks.append(m)
    memo = {}

    def upper(i, used):
        ub = len(order) - i
        for cm in class_masks:
            ub = min(ub, bin(cm & ~used).count("1"))
        return ub

    def solve(i, used):
        key = (i, used)
        if key in memo:
            return memo[key]
        meter.tick()
        ub = upper(i, used)
        if ub == 0:
            memo[key] = (0, None)
            return memo[key]
        best = solve(i + 1, used)
        best = (best[0], None)
        if best[0] < ub:
            for e, mask in by_first[order[i]]:
                if mask & used:
                    continue
                val = 1 + solve(i + 1, used | mask)[0]
                if val > best[0]:
                    best = (val, e)
                    if val == ub:
                        break
        memo[key] = best
        return best

    try:
        value, _ = solve(0, 0)
    except _Exhausted:
        return OracleResult(len(greedy), greedy, False, meter.nodes)
    witness = []
    used, i = 0, 0
    while i < len(order):
        _, e = memo.get((i, used), (0, None))
        if e is not None:
            witness.append(e)
            for c in range(1, H.k):
                used |= bit[(c, e[c])]
        i += 1
    return OracleResult(value, sorted(witness), True, meter.nodes)


def max_rainbow_matching_exact(family, budget: OracleBudget = OracleBudget()) -> OracleResult:
    """Largest rainbow matching of a family, colours explored in index order.

    The witness is a dict ``{colour: edge}``.
    """
    members = family.members
    t = len(members)
    meter = _Meter(budget)
    if t == 0:
        return OracleResult(0, {}, True, 0)
    H0 = members[0]
    bit = _vertex_bits(H0, 0)
    per_colour = []
    for H in members:
        rows = []
        for e in H.edges:
            mask = 0
            for c, p in enumerate(e):
                mask |= bit[(c, p)]
            rows.append((e, mask))
        per_colour.append(rows)
    class_masks = []
    for c in range(H0.k):
        m = 0
        for p in range(H0.class_sizes[c]):
            m |= bit[(c, p)]
        class_masks.append(m)
    memo = {}

    greedy = {}
    used0 = 0
    for j, rows in enumerate(per_colour):
        for e, mask in rows:
            if not mask & used0:
                greedy[j] = e
                used0 |= mask
                break

    def solve(j, used):
        key = (j, used)
        if key in memo:
            return memo[key]
        meter.tick()
        ub = t - j
        for cm in class_masks:
            ub = min(ub, bin(cm & ~used).count("1"))
        if ub == 0:
            memo[key] = (0, None)
            return memo[key]
        best = (solve(j + 1, used)[0], None)
        if best[0] < ub:
            for e, mask in per_colour[j]:
                if mask & used:
                    continue
                val = 1 + solve(j + 1, used | mask)[0]
                if val > best[0]:
                    best = (val, e)
                    if val == ub:
                        break
        memo[key] = best
        return best

    try:
        value, _ = solve(0, 0)
    except _Exhausted:
        return OracleResult(len(greedy), greedy, False, meter.nodes)
    witness = {}
    used = 0
    for j in range(t):
        _, e = memo.get((j, used), (0, None))
        if e is not None:
            witness[j] = e
            for c, p in enumerate(e):
                used |= bit[(c, p)]
    return OracleResult(value, witness, True, meter.nodes)


def is_dominating(H: KPartiteHypergraph, D) -> bool:
    """True iff every edge of ``H`` meets ``D``."""
    D = set(D)
    return all(any((c, p) in D for c, p in enumerate(e)) for e in H.edges)


def min_dominating_set_exact(H: KPartiteHypergraph, size_cap: int,
                             budget: OracleBudget = OracleBudget()) -> OracleResult:
    """Smallest vertex set meeting every edge, if one of size at most ``size_cap`` exists.

    Iterative deepening: at each node the lexicographically first
    undominated edge is taken and each of its vertices is tried, highest
    degree first. Only vertices of positive degree are ever chosen.
    ``value`` is the sorted set, or ``None`` when none fits the cap.
    """
    meter = _Meter(budget)
    edges = H.edges

    def search(chosen, depth):
        meter.tick()
        for e in edges:
            if not any((c, p) in chosen for c, p in enumerate(e)):
                break
        else:
            return set(chosen)
        if depth == 0:
            return None
        verts = sorted(enumerate(e), key=lambda v: (-H.vertex_degree(v), v))
        for v in verts:
            chosen.add(v)
            found = search(chosen, depth - 1)
            chosen.discard(v)
            if found is not None:
                return found
        return None

    try:
        for size in range(0, max(0, size_cap) + 1):
            found = search(set(), size)
            if found is not None:
                return OracleResult(sorted(found), sorted(found), True, meter.nodes)
    except _Exhausted:
        return OracleResult(None, None, False, meter.nodes)
    return OracleResult(None, None, True, meter.nodes)


_BOUNDS = {
    "fact_1_5": lambda n, k, Q: min(n - k + 2, Q),
    "thm_main": lambda n, k, Q: min(n - 1, Q),
    "thm_1_7": lambda n, k, Q: min(n, Q),
}


def verify_theorem_bound(H: KPartiteHypergraph, profile, which: str,
                         budget: OracleBudget = OracleBudget(), instance_id=None) -> dict:
    """Compare the matching number with one of the three lower bounds.

    ``fact_1_5`` holds for every ``n`` so a violation is ``fail``; the other
    two are asserted only for large ``n``, so a violation is recorded as
    ``below_threshold``.
    """
    if which not in _BOUNDS:
        raise InvalidInput(f"unknown check {which!r}; expected one of {sorted(_BOUNDS)}")
    profile = DegreeProfile(tuple(profile))
    n = H.n
    bound = max(0, _BOUNDS[which](n, H.k, profile.Q))
    report = {"instance_id": instance_id, "check": which, "bound": bound, "nu": None,
              "status": None, "witness": None}
    if len(profile) != H.k or not profile.dominated_by(H):
        report["status"] = "hypothesis_unmet"
        return report
    res = max_matching_exact(H, budget)
    report["nu"] = res.value
    report["witness"] = [list(e) for e in res.witness]
    if not res.exact:
        report["status"] = "pass" if res.value >= bound else "inconclusive"
    elif res.value >= bound:
        report["status"] = "pass"
    else:
        report["status"] = "fail" if which == "fact_1_5" else "below_threshold"
    return report
