"""
Constructive rainbow matchings under degree and multiplicity conditions.

Every algorithm runs in one of two regimes, fixed by :class:`RainbowConfig`:

``guaranteed``
    All stated thresholds are checked up front (``HypothesisUnmet`` if one
    fails) and every later step is expected to succeed; a failing step is
    an ``InvariantViolation``.
``best_effort``
    Size thresholds on ``n`` (and, where noted, ``t``) are skipped. Output
    is still validated; a step that cannot be carried out is recorded in
    the trace and the best matching found is returned with status
    ``shortfall``.

All "pick any" choices resolve to the lexicographically smallest option.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bipartite import (
    BipartiteGraph,
    Core,
    RobustWitness,
    as_fraction,
    core_from_violation,
    dichotomy_24,
    max_bip_matching,
)
from .core import DegreeProfile, KPartiteHypergraph, greedy_matching, matching_vertices
from .errors import HypothesisUnmet, InvalidInput, InvariantViolation
from .family import (
    HypergraphFamily,
    min_multiplicity,
    rainbow_to_json,
    rainbow_vertices,
    validate_rainbow,
)
from .oracles import OracleBudget, is_dominating, max_matching_exact, max_rainbow_matching_exact, \
    min_dominating_set_exact

__all__ = [
    "RainbowConfig",
    "RainbowResult",
    "StabilityOutcome",
    "MatchingSearch",
    "greedy_rainbow",
    "matching_of_size_at_least",
    "almost_perfect_rainbow",
    "rainbow_or_dominating",
    "high_degree_core",
    "rainbow_m_plus_q",
    "pokrovskiy_rainbow",
    "search_rainbow_counterexamples",
]

GUARANTEED = "guaranteed"
BEST_EFFORT = "best_effort"


@dataclass(frozen=True)
class RainbowConfig:
    """Regime and constants.

    ``eta`` defaults to ``1/(200k)`` and ``mu`` to ``1/50`` where used.
    ``pokrovskiy_factor`` replaces ``k**10`` in the best-effort size check
    of :func:`pokrovskiy_rainbow`.
    """

    mode: str = BEST_EFFORT
    eta: Fraction | None = None
    mu: Fraction = Fraction(1, 50)
    budget: OracleBudget = field(default_factory=lambda: OracleBudget(200_000, 10.0))
    pokrovskiy_factor: int = 1
    validate_samples: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (GUARANTEED, BEST_EFFORT):
            raise InvalidInput(f"mode must be {GUARANTEED!r} or {BEST_EFFORT!r}, got {self.mode!r}")

    @property
    def guaranteed(self) -> bool:
        return self.mode == GUARANTEED

    def eta_for(self, k: int) -> Fraction:
        return as_fraction(self.eta) if self.eta is not None else Fraction(1, 200 * k)


@dataclass
class RainbowResult:
    matching: dict
    target: int
    mode: str
    status: str
    trace: list = field(default_factory=list)

    @property
    def achieved(self) -> int:
        return len(self.matching)

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_dict(self) -> dict:
        return {"mode": self.mode, "status": self.status, "target": self.target,
                "achieved": self.achieved, "matching": rainbow_to_json(self.matching),
                "trace": self.trace}


@dataclass
class StabilityOutcome:
    """``kind`` is ``perfect``, ``dominated`` or ``inconclusive``."""

    kind: str
    matching: dict = field(default_factory=dict)
    C: tuple = ()
    dominating_sets: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "outcome": self.kind,
            "matching": rainbow_to_json(self.matching),
            "C": list(self.C),
            "dominating_sets": {str(j): [list(v) for v in D] for j, D in sorted(self.dominating_sets.items())},
            "trace": self.trace,
        }


@dataclass
class MatchingSearch:
    """``status``: ``found`` (matching has the target size), ``absent`` (proved smaller) or ``unknown``.

    ``matching`` is the largest matching seen (a maximum one when ``absent``).
    """

    status: str
    matching: list


class _StepFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# shared helpers


def _profile(profile, k) -> DegreeProfile:
    p = profile if isinstance(profile, DegreeProfile) else DegreeProfile(tuple(profile))
    if len(p) != k:
        raise InvalidInput(f"profile has {len(p)} entries but the family has k={k}")
    return p


def _check_degrees(F: HypergraphFamily, profile: DegreeProfile):
    for j, H in enumerate(F.members):
        got = H.codegree_profile()
        if any(a > c for a, c in zip(profile, got)):
            raise HypothesisUnmet(f"member {j} has codegrees {got}, below profile {profile.a}")


def _check_multiplicity(F: HypergraphFamily, m: int):
    if m and min_multiplicity(F) < m:
        raise HypothesisUnmet(f"some crossing tuple lies in fewer than m={m} members")


def _free_positions(F: HypergraphFamily, used) -> list:
    H0 = F.members[0]
    return [[p for p in H0.alive(c) if (c, p) not in used] for c in range(H0.k)]


def _fill(partial, i, v) -> tuple:
    return partial[:i] + (v,) + partial[i + 1:]


def _owner(M: dict) -> dict:
    return {(c, p): j for j, e in M.items() for c, p in enumerate(e)}


def _fail(cfg, trace, message, state):
    if cfg.guaranteed:
        raise InvariantViolation(message, state)
    trace.append({"step": "failed", "reason": message})


def greedy_rainbow(F: HypergraphFamily, colours=None, blocked=()) -> dict:
    """One pass over ``colours`` adding each colour's first edge that avoids the matching so far."""
    used = set(blocked)
    out = {}
    for j in (range(F.t) if colours is None else colours):
        for e in F.members[j].edges:
            if all((c, p) not in used for c, p in enumerate(e)):
                out[j] = e
                used.update(enumerate(e))
                break
    return out


def matching_of_size_at_least(H: KPartiteHypergraph, target: int,
                              budget: OracleBudget = OracleBudget()) -> MatchingSearch:
    """Decide whether ``H`` has a matching of ``target`` edges: greedy first, then the exact oracle."""
    greedy = greedy_matching(H)
    if len(greedy) >= target:
        return MatchingSearch("found", greedy[:max(target, 0)])
    if target > H.n:
        return MatchingSearch("absent" if H.n < target else "unknown", greedy)
    res = max_matching_exact(H, budget)
    best = res.witness if len(res.witness) > len(greedy) else greedy
    if len(best) >= target:
        return MatchingSearch("found", list(best)[:target])
    return MatchingSearch("absent" if res.exact else "unknown", list(best))


def _truncate(M: dict, target: int, keep=()) -> dict:
    keep = set(keep)
    order = sorted(M, key=lambda j: (j not in keep, j))
    return {j: M[j] for j in sorted(order[:target])}


# ---------------------------------------------------------------------------
# almost-perfect rainbow matching with prescribed colours


def _augment(F: HypergraphFamily, M: dict, k: int):
    """Enlarge ``M`` by one edge using the direct, one-swap or two-swap move.

    Returns a short label for the move, or ``None`` when no move applies.
    """
    t = F.t
    used = rainbow_vertices(M)
    D = [j for j in range(t) if j not in M]
    for j in D:
        for e in F.members[j].edges:
            if all((c, p) not in used for c, p in enumerate(e)):
                M[j] = e
                return "extend"
    free = _free_positions(F, used)
    if any(len(col) < k for col in free):
        return None
    pos = [0] * k
    ts = []
    for i in range(k):
        tup = [None] * k
        for c in range(k):
            if c != i:
                tup[c] = free[c][pos[c]]
                pos[c] += 1
        ts.append(tuple(tup))
    f = tuple(free[c][pos[c]] for c in range(k))
    in_f = [j for j in range(t) if F.members[j].has_edge(f)]
    owner = _owner(M)
    for i in range(k):
        for j in D:
            for v in F.members[j].neighbourhood(ts[i]):
                c = owner.get((i, v))
                if c is None:
                    M[j] = _fill(ts[i], i, v)
                    return "extend"
                if c in in_f:
                    del M[c]
                    M[c] = f
                    M[j] = _fill(ts[i], i, v)
                    return "swap_one"
    if len(D) < k:
        return None
    d = D[:k]
    hits = {}
    for i in range(k):
        for v in F.members[d[i]].neighbourhood(ts[i]):
            hits.setdefault(owner[(i, v)], []).append((i, v))
    for c in sorted(hits):
        if len(hits[c]) >= 2:
            (i, v), (i2, v2) = hits[c][0], hits[c][1]
            del M[c]
            M[d[i]] = _fill(ts[i], i, v)
            M[d[i2]] = _fill(ts[i2], i2, v2)
            return "swap_two"
    return None


def _pull_colour(F: HypergraphFamily, profile: DegreeProfile, M: dict, j: int, C: set) -> bool:
    """Swap colour ``j`` into ``M`` without losing any colour of ``C`` or changing the size."""
    k = F.k
    i = max(range(k), key=lambda x: (profile[x], -x))
    used = rainbow_vertices(M)
    free = _free_positions(F, used)
    if any(not free[c] for c in range(k) if c != i):
        return False
    f = tuple(None if c == i else free[c][0] for c in range(k))
    owner = _owner(M)
    for v in F.members[j].neighbourhood(f):
        c = owner.get((i, v))
        if c is None:
            others = [x for x in sorted(M) if x not in C]
            if not others:
                return False
            del M[others[0]]
        elif c not in C:
            del M[c]
        else:
            continue
        M[j] = _fill(f, i, v)
        return True
    return False


def almost_perfect_rainbow(F: HypergraphFamily, profile, m: int, C=(),
                           config: RainbowConfig = RainbowConfig()) -> RainbowResult:
    """Rainbow matching of size ``m + Q`` that uses every colour in ``C``.

    Needs codegrees at least ``profile`` in every member, every crossing
    tuple in at least ``m`` members, ``|C| <= Q/k`` and
    ``n, t >= m + Q + k - 1``. A greedy rainbow matching is grown by the
    augmentation moves of :func:`_augment` until it has ``m + Q`` edges,
    then colours of ``C`` are swapped in one at a time.
    """
    t = F.t
    k = F.k
    profile = _profile(profile, k) if t else DegreeProfile(tuple(profile))
    Q = profile.Q
    target = m + Q
    C = sorted(set(C))
    if any(not 0 <= j < t for j in C):
        raise InvalidInput(f"colour set {C} not within range({t})")
    trace = []
    if config.guaranteed:
        if k * len(C) > Q:
            raise HypothesisUnmet(f"|C| = {len(C)} exceeds Q/k = {Fraction(Q, k)}")
        n = F.members[0].n if t else 0
        if n < target + k - 1 or t < target + k - 1:
            raise HypothesisUnmet(f"need n, t >= m+Q+k-1 = {target + k - 1}; have n={n}, t={t}")
        _check_degrees(F, profile)
        _check_multiplicity(F, m)
    if target == 0 and not C:
        return RainbowResult({}, 0, config.mode, "success", trace)
    if t == 0:
        return RainbowResult({}, target, config.mode, "shortfall", ["empty family"])

    M = _truncate(greedy_rainbow(F), target, C)
    trace.append({"step": "greedy", "size": len(M)})
    while len(M) < target:
        move = _augment(F, M, k)
        if move is None:
            _fail(config, trace, "no augmenting move applies",
                  {"matching": dict(M), "target": target, "profile": profile.a, "m": m})
            break
        trace.append({"step": move, "size": len(M)})
    if len(M) >= target:
        Cset = set(C)
        for j in C:
            if j in M:
                continue
            if not _pull_colour(F, profile, M, j, Cset):
                _fail(config, trace, f"colour {j} could not be swapped in",
                      {"matching": dict(M), "C": C, "profile": profile.a})
                break
            trace.append({"step": "pull_colour", "colour": j})
    ok, bad = validate_rainbow(F, M)
    if not ok:
        raise InvariantViolation("constructed matching is not rainbow", {"violation": bad})
    done = len(M) == target and all(j in M for j in C)
    return RainbowResult(dict(sorted(M.items())), target, config.mode,
                         "success" if done else "shortfall", trace)


# ---------------------------------------------------------------------------
# perfect rainbow matching or many small dominating sets


def _small_dominating_set(H: KPartiteHypergraph, cap: int, budget: OracleBudget):
    """A dominating set of size <= cap: ``(set, True)``, ``(None, True)`` if none exists, ``(None, False)`` if unknown."""
    if not H.edges:
        return [], True
    greedy = sorted(matching_vertices(greedy_matching(H)))
    if len(greedy) <= cap:
        return greedy, True
    res = min_dominating_set_exact(H, cap, budget)
    return res.value, res.exact


def rainbow_or_dominating(F: HypergraphFamily, profile, epsilon,
                          config: RainbowConfig = RainbowConfig()) -> StabilityOutcome:
    """A perfect rainbow matching, or many colours with dominating sets of size ``<= (1+2k eps)Q``.

    First every member is searched for a small dominating set. If at least
    ``(1-eps)Q`` members have one, that outcome is returned. Otherwise the
    members without one are put first and the two-pass construction runs:
    a reverse pass that reserves, for each position ``r = t..1``, either
    nothing (a matching of ``k r`` edges exists in what is left), a vertex
    of degree ``>= k r n**(k-2)``, or an edge; then a forward pass that
    turns the reservations into a perfect rainbow matching.
    """
    t = F.t
    if t == 0:
        return StabilityOutcome("perfect")
    k = F.k
    profile = _profile(profile, k)
    Q = profile.Q
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise InvalidInput(f"epsilon must lie in (0, 1), got {eps}")
    H0 = F.members[0]
    n = H0.n
    if config.guaranteed:
        if t > (1 + eps) * Q:
            raise HypothesisUnmet(f"t = {t} exceeds (1+eps)Q = {(1 + eps) * Q}")
        if n < 8 * k ** 3 * Q / eps:
            raise HypothesisUnmet(f"n = {n} below 8k^3Q/eps = {8 * k ** 3 * Q / eps}")
        _check_degrees(F, profile)
    trace = []
    cap = math.floor((1 + 2 * k * eps) * Q)
    need = math.ceil((1 - eps) * Q)
    dom, unknown = {}, []
    for j, H in enumerate(F.members):
        D, exact = _small_dominating_set(H, cap, config.budget)
        if D is not None:
            dom[j] = tuple(D)
        elif not exact:
            unknown.append(j)
    trace.append({"step": "dominating_search", "cap": cap, "found": sorted(dom), "unknown": unknown})
    if Q > 0 and len(dom) >= need:
        for j, D in dom.items():
            if not is_dominating(F.members[j], D) or len(D) > cap:
                raise InvariantViolation("dominating set failed validation", {"colour": j, "set": D})
        return StabilityOutcome("dominated", {}, tuple(sorted(dom)), dom, trace)

    order = [j for j in range(t) if j not in dom] + [j for j in range(t) if j in dom]
    N = max(len(H0.alive(c)) for c in range(k))
    all_vertices = set(H0.vertices())
    U = set(all_vertices)
    plan = {}
    for r in range(t, 0, -1):
        j = order[r - 1]
        Hr = F.members[j].induced(all_vertices - U)
        if k * r <= Hr.n:
            found = matching_of_size_at_least(Hr, k * r, config.budget)
            if found.status == "found":
                plan[r] = ("matching", Hr, found.matching)
                continue
        threshold = k * r * N ** (k - 2)
        x = next((v for v in Hr.vertices() if Hr.vertex_degree(v) >= threshold), None)
        if x is not None:
            plan[r] = ("vertex", Hr, x)
            U.discard(x)
            continue
        if Hr.edges:
            e = Hr.edges[0]
            plan[r] = ("edge", Hr, e)
            U.difference_update(enumerate(e))
            continue
        trace.append({"step": "reverse_pass_stuck", "position": r, "colour": j,
                      "reserved": len(all_vertices - U)})
        if config.guaranteed and not unknown:
            raise InvariantViolation("reverse pass stuck although few members have small dominating sets",
                                     {"position": r, "colour": j, "dominated": sorted(dom)})
        if Q == 0:
            return StabilityOutcome("dominated", {}, (), {}, trace)
        return StabilityOutcome("inconclusive", {}, tuple(sorted(dom)), dom, trace)
    trace.append({"step": "reverse_pass", "kinds": [plan[r][0] for r in range(1, t + 1)]})

    M = {}
    used = set()
    for r in range(1, t + 1):
        j = order[r - 1]
        kind, Hr, item = plan[r]
        if kind == "edge":
            e = item
        elif kind == "vertex":
            c, p = item
            e = next((f for f in Hr.edges if f[c] == p
                      and all((cc, pp) not in used for cc, pp in enumerate(f))), None)
        else:
            e = next((f for f in item if all((cc, pp) not in used for cc, pp in enumerate(f))), None)
        if e is None or any(v in used for v in enumerate(e)):
            raise InvariantViolation("forward pass could not place an edge",
                                     {"position": r, "colour": j, "kind": kind})
        M[j] = e
        used.update(enumerate(e))
    ok, bad = validate_rainbow(F, M)
    if not ok:
        raise InvariantViolation("forward pass produced an invalid rainbow matching", {"violation": bad})
    return StabilityOutcome("perfect", dict(sorted(M.items())), (), {}, trace)


def high_degree_core(H: KPartiteHypergraph, D, profile, mu,
                     config: RainbowConfig = RainbowConfig()) -> list:
    """Vertices of the dominating set ``D`` lying in at least ``n**(k-1)/2`` edges.

    In the guaranteed regime (``n >= 5(1+mu)Q``, ``|D| <= (1+mu)Q``) the
    result has at least ``(1-2mu)Q`` vertices, which is asserted.
    """
    D = sorted(set(tuple(v) for v in D))
    profile = _profile(profile, H.k)
    mu = as_fraction(mu)
    Q = profile.Q
    n = max(len(H.alive(c)) for c in range(H.k))
    if not is_dominating(H, D):
        raise InvalidInput("D does not dominate H")
    if config.guaranteed:
        if n < 5 * (1 + mu) * Q or len(D) > (1 + mu) * Q:
            raise HypothesisUnmet("need n >= 5(1+mu)Q and |D| <= (1+mu)Q")
        _check_degrees(HypergraphFamily((H,)), profile)
    half = n ** (H.k - 1)
    A = [x for x in D if 2 * H.vertex_degree(x) >= half]
    if config.guaranteed and Q > 0 and len(A) < (1 - 2 * mu) * Q:
        raise InvariantViolation("fewer than (1-2mu)Q high-degree vertices",
                                 {"D": D, "A": A, "Q": Q, "mu": str(mu)})
    return A


# ---------------------------------------------------------------------------
# rainbow matching of size m + Q


def _extend_pairs(F: HypergraphFamily, M: dict, pairs) -> dict:
    """For each ``(colour, vertex)`` pair add an edge of that colour through the vertex.

    The new edge avoids ``V(M)``, earlier new edges, and every other
    pair's vertex. Raises ``_StepFailed`` when some pair cannot be served.
    """
    M = dict(M)
    forbidden = rainbow_vertices(M) | {x for _, x in pairs}
    for j, x in pairs:
        c, p = x
        e = next((f for f in F.members[j].edges if f[c] == p and all(
            (cc, pp) == x or (cc, pp) not in forbidden for cc, pp in enumerate(f))), None)
        if e is None:
            raise _StepFailed(f"no edge of colour {j} through {x} avoids the matching")
        M[j] = e
        forbidden.update(enumerate(e))
    return M


def _set_aside(F: HypergraphFamily, profile: DegreeProfile, colours) -> dict:
    """Perfect rainbow matching on ``colours`` from disjoint tuples avoiding the largest class."""
    k = F.k
    if not colours:
        return {}
    i = max(range(k), key=lambda x: (profile[x], -x))
    if profile[i] < len(colours):
        raise _StepFailed(f"a_max = {profile[i]} < {len(colours)} colours to set aside")
    free = _free_positions(F, set())
    if any(len(free[c]) < len(colours) for c in range(k) if c != i):
        raise _StepFailed("not enough vertices for the set-aside tuples")
    tuples = [tuple(None if c == i else free[c][r] for c in range(k)) for r in range(len(colours))]
    used = set()
    M = {}
    for j, tup in zip(colours, tuples):
        v = next((v for v in F.members[j].neighbourhood(tup) if (i, v) not in used), None)
        if v is None:
            raise _StepFailed(f"set-aside tuple for colour {j} has no unused completion")
        used.add((i, v))
        M[j] = _fill(tup, i, v)
    return M


def _reduce_profile(a, total):
    a = list(a)
    for c in range(len(a) - 1, -1, -1):
        while sum(a) > total and a[c] > 0:
            a[c] -= 1
    return DegreeProfile(tuple(a))


def _large_case(F, profile, m, target, config, trace):
    k, t, Q = F.k, F.t, profile.Q
    s = Q // 2
    eta = config.eta_for(k)
    mu = as_fraction(config.mu)
    out = rainbow_or_dominating(F, profile, eta, config)
    trace.append({"step": "rainbow_or_dominating", "outcome": out.kind})
    if out.kind == "perfect":
        return _truncate(out.matching, target)
    if out.kind != "dominated":
        raise _StepFailed("rainbow-or-dominating pass was inconclusive")
    A = list(out.C)
    H0 = F.members[0]
    verts = H0.vertices()
    N = max(len(H0.alive(c)) for c in range(k))
    half = N ** (k - 1)
    rows = []
    for j in A:
        H = F.members[j]
        core = high_degree_core(H, out.dominating_sets[j], profile, 2 * k * eta, config)
        row = tuple(x for x, v in enumerate(verts) if 2 * H.vertex_degree(v) >= half)
        rows.append(row)
        trace.append({"step": "high_degree_core", "colour": j, "size": len(core), "degree_G": len(row)})
    G = BipartiteGraph(len(A), len(verts), tuple(rows))
    try:
        split = dichotomy_24(G, Q, mu, config.validate_samples, config.seed)
    except HypothesisUnmet as exc:
        if config.guaranteed:
            raise InvariantViolation(f"dichotomy hypotheses failed: {exc}", {"A": A}) from exc
        raise _StepFailed(f"dichotomy hypotheses failed: {exc}") from exc

    if isinstance(split, RobustWitness):
        rest = [j for j in range(t) if j not in set(A)]
        M = _set_aside(F, profile, rest)
        index = {v: x for x, v in enumerate(verts)}
        Y = sorted(index[v] for v in rainbow_vertices(M))
        MG = max_bip_matching(G.without_right(Y))
        trace.append({"step": "branch_a", "set_aside": len(M), "matched": len(MG)})
        if len(MG) == len(A):
            pairs = sorted((A[u], verts[x]) for u, x in MG)
            full = _extend_pairs(F, M, pairs)
            return _truncate(full, target)
        split = core_from_violation(G, Y, Q, mu, config.validate_samples, config.seed)

    assert isinstance(split, Core)
    X = [A[u] for u in split.X]
    Z = [verts[x] for x in split.B_prime]
    trace.append({"step": "branch_b", "X": len(X), "Z": len(Z)})
    reduced = [max(0, profile[c] - sum(1 for v in Z if v[0] == c)) for c in range(k)]
    sub_profile = _reduce_profile(reduced, Q - s)
    if sub_profile.Q != Q - s:
        raise _StepFailed("reduced profile sums below Q - s")
    F2 = F.induced(Z)
    C2 = [j for j in range(t) if j not in set(X)]
    sub = almost_perfect_rainbow(F2, sub_profile, m, C2, config)
    trace.append({"step": "almost_perfect", "status": sub.status, "size": sub.achieved})
    if not sub.success:
        raise _StepFailed("almost-perfect rainbow matching fell short")
    M = sub.matching
    U = [j for j in range(t) if j not in M]
    A_prime = U[:s]
    if len(A_prime) < s or not set(A_prime) <= set(X):
        raise _StepFailed("unused colours do not fit inside X")
    index_A = {j: u for u, j in enumerate(A)}
    MG = max_bip_matching(G.restrict([index_A[j] for j in A_prime], split.B_prime))
    if len(MG) != s:
        raise _StepFailed("core subset has no perfect matching")
    if len(M) + len(MG) != target:
        raise InvariantViolation("size accounting broken", {"M": len(M), "MG": len(MG), "target": target})
    pairs = sorted((A[u], verts[x]) for u, x in MG)
    return _extend_pairs(F, M, pairs)


def _small_case(F, profile, m, target, config, trace):
    k, Q = F.k, profile.Q
    if Q == 0:
        raise _StepFailed("Q = 0 leaves nothing for the dominating-set argument")
    eps = Fraction(1, 3 * k * Q)
    out = rainbow_or_dominating(F, profile, eps, config)
    trace.append({"step": "rainbow_or_dominating", "outcome": out.kind})
    if out.kind == "perfect":
        return _truncate(out.matching, target)
    if out.kind != "dominated":
        raise _StepFailed("rainbow-or-dominating pass was inconclusive")
    S = out.dominating_sets
    X = set().union(*(set(D) for D in S.values())) if S else set()
    H0 = F.members[0]
    M = {}
    for j in sorted(S):
        if len(M) == target:
            break
        used = rainbow_vertices(M)
        counts = [sum(1 for v in used & X if v[0] == c) for c in range(k)]
        i = next((c for c in range(k) if counts[c] < profile[c]), None)
        if i is None:
            raise _StepFailed("every class already meets its quota inside X")
        blocked = used | X
        pools = [(None,) if c == i else [p for p in H0.alive(c) if (c, p) not in blocked]
                 for c in range(k)]
        f = next(itertools.product(*pools), None)
        if f is None:
            raise _StepFailed("no free tuple outside X")
        u = next((v for v in F.members[j].neighbourhood(f) if (i, v) not in used), None)
        if u is None:
            raise _StepFailed(f"tuple {f} has no free completion for colour {j}")
        M[j] = _fill(f, i, u)
    if len(M) < target:
        raise _StepFailed("ran out of colours with small dominating sets")
    return M


def rainbow_m_plus_q(F: HypergraphFamily, profile, m: int,
                     config: RainbowConfig = RainbowConfig()) -> RainbowResult:
    """Rainbow matching of size ``m + Q``.

    Guaranteed regime: ``n >= max(1600 k^4 Q, 100 k^6)`` and
    ``m + Q <= t <= (1 + 1/(200k)) Q``. Best effort keeps only
    ``m + Q <= t``; when the construction stalls it falls back to
    :func:`almost_perfect_rainbow` without colour constraints and reports
    which step stalled.
    """
    t = F.t
    k = F.k
    profile = _profile(profile, k) if t else DegreeProfile(tuple(profile))
    Q = profile.Q
    target = m + Q
    if target > t:
        raise HypothesisUnmet(f"m+Q = {target} exceeds t = {t}")
    trace = []
    if target == 0:
        return RainbowResult({}, 0, config.mode, "success", trace)
    if config.guaranteed:
        n = F.members[0].n
        need = max(1600 * k ** 4 * Q, 100 * k ** 6)
        if n < need:
            raise HypothesisUnmet(f"n = {n} below max(1600k^4Q, 100k^6) = {need}")
        if t > (1 + Fraction(1, 200 * k)) * Q:
            raise HypothesisUnmet(f"t = {t} exceeds (1+1/200k)Q")
        _check_degrees(F, profile)
        _check_multiplicity(F, m)
    case = "large" if Q // 2 >= k - 1 else "small"
    trace.append({"step": "case", "case": case})
    try:
        if case == "large":
            M = _large_case(F, profile, m, target, config, trace)
        else:
            M = _small_case(F, profile, m, target, config, trace)
    except _StepFailed as exc:
        if config.guaranteed:
            raise InvariantViolation(f"step failed: {exc}", {"case": case, "trace": trace}) from exc
        trace.append({"step": "failed", "reason": str(exc)})
        M = None
    if M is not None:
        ok, bad = validate_rainbow(F, M)
        if not ok:
            raise InvariantViolation("constructed matching is not rainbow", {"violation": bad})
        if len(M) == target:
            return RainbowResult(dict(sorted(M.items())), target, config.mode, "success", trace)
        _fail(config, trace, f"constructed {len(M)} edges instead of {target}", {"trace": trace})
    fallback = almost_perfect_rainbow(F, profile, m, (), RainbowConfig(BEST_EFFORT, budget=config.budget))
    trace.append({"step": "fallback_augmentation", "size": fallback.achieved})
    best = fallback.matching
    if M is not None and len(M) > len(best):
        best = _truncate(M, target)
    status = "success" if len(best) == target else "shortfall"
    return RainbowResult(dict(sorted(best.items())), target, config.mode, status, trace)


# ---------------------------------------------------------------------------
# perfect rainbow matching by induction on t


def _pokrovskiy(graphs, colours, a, config, trace, depth=0):
    t = len(graphs)
    if t == 0:
        return {}
    k = graphs[0].k
    H = graphs[-1]
    colour = colours[-1]
    istar = max(range(k), key=lambda c: (a[c], -c))
    search = matching_of_size_at_least(H, k * t - k + 1, config.budget)
    if search.status == "found":
        trace.append({"depth": depth, "colour": colour, "case": 1})
        sub = _pokrovskiy(graphs[:-1], colours[:-1], a, config, trace, depth + 1)
        used = rainbow_vertices(sub)
        e = next((e for e in search.matching if all(v not in used for v in enumerate(e))), None)
        if e is None:
            _fail(config, trace, "case 1: every edge of the large matching is blocked",
                  {"colour": colour, "depth": depth})
            return sub
        sub[colour] = e
        return sub

    D = matching_vertices(search.matching)
    free = [[p for p in H.alive(c) if (c, p) not in D] for c in range(k)]
    want = k ** 5 * t
    avail = min((len(free[c]) for c in range(k) if c != istar), default=0)
    if avail < want:
        if config.guaranteed:
            raise InvariantViolation("not enough disjoint tuples outside the dominating set",
                                     {"want": want, "available": avail, "colour": colour})
        want = avail
    tuples = [tuple(None if c == istar else free[c][r] for c in range(k)) for r in range(want)]
    counts = {}
    for r, tup in enumerate(tuples):
        for v in H.neighbourhood(tup):
            counts.setdefault(v, []).append(r)
    v = None
    if counts:
        v = max(sorted(counts), key=lambda x: len(counts[x]))
    hits = counts.get(v, [])
    trace.append({"depth": depth, "colour": colour, "case": 2, "vertex": (istar, v), "tuples": want,
                  "hits": len(hits)})
    if config.guaranteed and len(hits) < k * k * t:
        raise InvariantViolation("no vertex meets k^2 t of the sampled tuples",
                                 {"colour": colour, "best": len(hits), "need": k * k * t})
    if v is None:
        _fail(config, trace, "case 2: no sampled tuple has a neighbour", {"colour": colour})
        return _pokrovskiy(graphs[:-1], colours[:-1], a, config, trace, depth + 1)
    a2 = list(a)
    a2[istar] = max(0, a2[istar] - 1)
    rest = [G.induced([(istar, v)]) for G in graphs[:-1]]
    sub = _pokrovskiy(rest, colours[:-1], tuple(a2), config, trace, depth + 1)
    used = rainbow_vertices(sub)
    r = next((r for r in hits if all(x not in used for x in enumerate(tuples[r]) if x[1] is not None)), None)
    if r is None:
        _fail(config, trace, "case 2: every tuple adjacent to the chosen vertex is blocked",
              {"colour": colour, "depth": depth})
        return sub
    sub[colour] = _fill(tuples[r], istar, v)
    return sub


def pokrovskiy_rainbow(F: HypergraphFamily, profile,
                       config: RainbowConfig = RainbowConfig()) -> RainbowResult:
    """Perfect rainbow matching when ``t <= Q <= min |V_i| / k**10`` (induction on ``t``).

    If the last member has a matching of ``kt-k+1`` edges the rest is solved
    recursively and one of those edges is added. Otherwise the vertex set
    ``D`` of a maximum matching dominates it; among ``k**5 t`` disjoint
    tuples avoiding the largest-profile class and ``D``, the vertex ``v``
    adjacent to most of them is reserved, the rest is solved without
    ``v``, and ``v`` is completed by a free adjacent tuple. Best effort
    replaces ``k**10`` with ``config.pokrovskiy_factor`` and clamps the
    tuple sample to what is available.
    """
    t = F.t
    if t == 0:
        return RainbowResult({}, 0, config.mode, "success", [])
    k = F.k
    profile = _profile(profile, k)
    Q = profile.Q
    if t > Q:
        raise HypothesisUnmet(f"t = {t} exceeds Q = {Q}")
    n = F.members[0].n
    factor = k ** 10 if config.guaranteed else config.pokrovskiy_factor
    if Q * factor > n:
        raise HypothesisUnmet(f"Q = {Q} exceeds min class size / {factor}")
    if config.guaranteed:
        _check_degrees(F, profile)
    trace = []
    M = _pokrovskiy(list(F.members), list(range(t)), profile.a, config, trace)
    ok, bad = validate_rainbow(F, M)
    if not ok:
        raise InvariantViolation("recursive construction is not rainbow", {"violation": bad})
    return RainbowResult(dict(sorted(M.items())), t, config.mode,
                         "success" if len(M) == t else "shortfall", trace)


# ---------------------------------------------------------------------------
# exploratory search beyond the proven range


def search_rainbow_counterexamples(k: int, n: int, t: int, trials: int, density=Fraction(1, 2),
                                   seed: int = 0, out=None,
                                   budget: OracleBudget = OracleBudget()) -> list:
    """Random families where ``t >= m + Q`` but the largest rainbow matching is smaller than ``m + Q``.

    ``m`` and the profile are the exact values of each family. Nothing is
    claimed about what the candidates mean; they are written (JSON lines)
    to ``out`` when given, for inspection.
    """
    from .constructions import SplitMix64

    p = as_fraction(density)
    rng = SplitMix64(seed)
    tuples = list(itertools.product(range(n), repeat=k))
    found = []
    for trial in range(trials):
        members = tuple(
            KPartiteHypergraph([n] * k, [e for e in tuples if rng.bernoulli(p)]) for _ in range(t))
        F = HypergraphFamily(members)
        a = F.codegree_profile()
        m = min_multiplicity(F)
        target = m + sum(a)
        if t < target:
            continue
        res = max_rainbow_matching_exact(F, budget)
        if res.exact and res.value < target:
            row = {"trial": trial, "seed": seed, "k": k, "n": n, "t": t, "profile": list(a), "m": m,
                   "target": target, "optimum": res.value,
                   "members": [[list(e) for e in H.edges] for H in members]}
            found.append(row)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            for row in found:
                fh.write(json.dumps(row, separators=(",", ":")) + "\n")
    return found
