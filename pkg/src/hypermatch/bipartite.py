"""
Bipartite matching, Hall violators, and the robust-matchability / core
dichotomy used to place high-degree colours.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisUnmet, InvalidInput, InvariantViolation

__all__ = [
    "BipartiteGraph",
    "max_bip_matching",
    "hall_violator",
    "RobustWitness",
    "Core",
    "dichotomy_24",
    "core_from_violation",
    "as_fraction",
]


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices ``0..left_size-1``, right vertices ``0..right_size-1``.

    ``adjacency[u]`` is the sorted tuple of right neighbours of ``u``.
    """

    left_size: int
    right_size: int
    adjacency: tuple

    def __post_init__(self):
        if self.left_size < 0 or self.right_size < 0:
            raise InvalidInput("class sizes must be non-negative")
        if len(self.adjacency) != self.left_size:
            raise InvalidInput("adjacency needs one row per left vertex")
        rows = []
        for u, row in enumerate(self.adjacency):
            row = tuple(row)
            if len(set(row)) != len(row):
                raise InvalidInput(f"duplicate edge at left vertex {u}")
            if any(not 0 <= v < self.right_size for v in row):
                raise InvalidInput(f"right index out of range at left vertex {u}")
            rows.append(tuple(sorted(row)))
        object.__setattr__(self, "adjacency", tuple(rows))

    @classmethod
    def from_edges(cls, left_size, right_size, edges):
        rows = [set() for _ in range(left_size)]
        for u, v in edges:
            rows[u].add(v)
        return cls(left_size, right_size, tuple(tuple(r) for r in rows))

    def edges(self):
        return [(u, v) for u, row in enumerate(self.adjacency) for v in row]

    def degree(self, u) -> int:
        return len(self.adjacency[u])

    def right_degrees(self) -> list:
        deg = [0] * self.right_size
        for row in self.adjacency:
            for v in row:
                deg[v] += 1
        return deg

    def neighbours(self, S) -> set:
        return {v for u in S for v in self.adjacency[u]}

    def without_right(self, Y) -> "BipartiteGraph":
        """Same vertex sets, with every edge at a right vertex of ``Y`` removed."""
        Y = set(Y)
        return BipartiteGraph(self.left_size, self.right_size,
                              tuple(tuple(v for v in row if v not in Y) for row in self.adjacency))

    def restrict(self, left, right) -> "BipartiteGraph":
        """Keep only edges between ``left`` and ``right``; indices are unchanged."""
        left, right = set(left), set(right)
        return BipartiteGraph(self.left_size, self.right_size, tuple(
            tuple(v for v in row if v in right) if u in left else ()
            for u, row in enumerate(self.adjacency)))


def _hopcroft_karp(G: BipartiteGraph):
    INF = math.inf
    mate_l = [-1] * G.left_size
    mate_r = [-1] * G.right_size
    adj = G.adjacency
    while True:
        dist = [INF] * G.left_size
        queue = deque()
        for u in range(G.left_size):
            if mate_l[u] == -1:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = mate_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break
        ptr = [0] * G.left_size
        for root in range(G.left_size):
            if mate_l[root] != -1:
                continue
            # iterative layered DFS from ``root``
            stack = [root]
            path = []
            while stack:
                u = stack[-1]
                advanced = False
                while ptr[u] < len(adj[u]):
                    v = adj[u][ptr[u]]
                    ptr[u] += 1
                    w = mate_r[v]
                    if w == -1:
                        path.append((u, v))
                        for a, b in path:
                            mate_l[a] = b
                            mate_r[b] = a
                        stack.clear()
                        advanced = True
                        break
                    if dist[w] == dist[u] + 1:
                        path.append((u, v))
                        stack.append(w)
                        advanced = True
                        break
                if not advanced:
                    dist[u] = INF
                    stack.pop()
                    if path:
                        path.pop()
    return mate_l, mate_r


def max_bip_matching(G: BipartiteGraph) -> list:
    """Maximum matching as a sorted list of ``(left, right)`` pairs (Hopcroft-Karp)."""
    mate_l, _ = _hopcroft_karp(G)
    return [(u, v) for u, v in enumerate(mate_l) if v != -1]


def hall_violator(G: BipartiteGraph):
    """``None`` if some matching covers every left vertex, else a set ``S`` with ``|N(S)| < |S|``.

    ``S`` is the set of left vertices reachable from unmatched left vertices
    along alternating paths of a maximum matching.
    """
    mate_l, mate_r = _hopcroft_karp(G)
    roots = [u for u in range(G.left_size) if mate_l[u] == -1]
    if not roots:
        return None
    seen_l = set(roots)
    seen_r = set()
    queue = deque(roots)
    while queue:
        u = queue.popleft()
        for v in G.adjacency[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = mate_r[v]
            if w != -1 and w not in seen_l:
                seen_l.add(w)
                queue.append(w)
    return frozenset(seen_l)


@dataclass(frozen=True)
class RobustWitness:
    """Every tested deletion set ``Y`` left a matching saturating the left side."""

    tested: tuple  # ((Y, matching), ...)


@dataclass(frozen=True)
class Core:
    """Left set ``X`` and right set ``B_prime`` (size ``floor(q/2)``) that is highly matchable to it."""

    X: tuple
    B_prime: tuple
    Y: tuple


def _saturates(G, Y):
    M = max_bip_matching(G.without_right(Y))
    return len(M) == G.left_size, M


def core_from_violation(G: BipartiteGraph, Y, q: int, mu, validate_samples: int = 50,
                        seed: int = 0) -> Core:
    """Build the core from a deletion set ``Y`` that breaks left saturation.

    ``X`` is the canonical Hall violator of ``G`` minus ``Y``. Right
    vertices of ``N(X)`` with more than ``q/5`` non-neighbours in ``X`` are
    discarded and ``B_prime`` is the smallest ``floor(q/2)`` survivors.
    The result is checked on up to ``validate_samples`` random subsets
    ``A' <= X`` of size ``floor(q/2)``.
    """
    mu = as_fraction(mu)
    Y = tuple(sorted(set(Y)))
    X = hall_violator(G.without_right(Y))
    state = {"q": q, "mu": str(mu), "Y": Y, "adjacency": G.adjacency}
    if X is None:
        raise InvalidInput("the deletion set does not break saturation")
    X = tuple(sorted(X))
    if len(X) <= (1 - 2 * mu) * q:
        raise InvariantViolation("violator smaller than (1-2mu)q", dict(state, X=X))
    N_X = sorted(G.neighbours(X))
    non_nbrs = {y: 0 for y in N_X}
    for x in X:
        row = set(G.adjacency[x])
        for y in N_X:
            if y not in row:
                non_nbrs[y] += 1
    keep = [y for y in N_X if 5 * non_nbrs[y] <= q]
    s = q // 2
    if len(keep) < s:
        raise InvariantViolation("too few right vertices survive the non-neighbour filter",
                                 dict(state, X=X, kept=keep))
    core = Core(X, tuple(keep[:s]), Y)
    _check_core(G, core, s, validate_samples, seed, state)
    return core


def _check_core(G, core, s, samples, seed, state):
    X = core.X
    total = math.comb(len(X), s)
    if total <= samples:
        subsets = itertools.combinations(X, s)
    else:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(X, s))) for _ in range(samples))
    for A in subsets:
        M = max_bip_matching(G.restrict(A, core.B_prime))
        if len(M) != s:
            raise InvariantViolation("core subset without a perfect matching",
                                     dict(state, X=X, B_prime=core.B_prime, subset=A))


def dichotomy_24(G: BipartiteGraph, q: int, mu, validate_samples: int = 50, seed: int = 0):
    """Either robust left-saturation or a highly matchable core.

    Requires ``|left| <= (1+mu)q`` and every left degree ``>= (1-mu)q``,
    with ``0 <= mu <= 1/50``. The deletion sets tried are the empty set
    and the greedy sequence that repeatedly removes the right vertex whose
    deletion lowers the maximum matching most (ties to the smallest
    index), up to ``floor(mu*q)`` deletions. If all of them leave a
    saturating matching a :class:`RobustWitness` is returned; otherwise
    the first breaking set produces a :class:`Core`.
    """
    mu = as_fraction(mu)
    if not isinstance(q, int) or q < 1:
        raise InvalidInput(f"q must be a positive integer, got {q!r}")
    if not 0 <= mu <= Fraction(1, 50):
        raise InvalidInput(f"mu must lie in [0, 1/50], got {mu}")
    if G.left_size > (1 + mu) * q:
        raise HypothesisUnmet(f"|left| = {G.left_size} exceeds (1+mu)q = {(1 + mu) * q}")
    low = [u for u in range(G.left_size) if G.degree(u) < (1 - mu) * q]
    if low:
        raise HypothesisUnmet(f"left vertices {low} have degree below (1-mu)q = {(1 - mu) * q}")

    limit = math.floor(mu * q)
    Y = []
    tested = []
    ok, M = _saturates(G, Y)
    while True:
        if not ok:
            return core_from_violation(G, Y, q, mu, validate_samples, seed)
        tested.append((tuple(Y), tuple(M)))
        if len(Y) >= limit:
            return RobustWitness(tuple(tested))
        base = len(M)
        best, best_size = None, None
        for v in range(G.right_size):
            if v in Y:
                continue
            size = len(max_bip_matching(G.without_right(Y + [v])))
            if best_size is None or size < best_size:
                best, best_size = v, size
            if best_size < base:
                # a single deletion lowers the matching by at most one
                break
        if best is None:
            return RobustWitness(tuple(tested))
        Y = Y + [best]
        ok, M = _saturates(G, Y)
