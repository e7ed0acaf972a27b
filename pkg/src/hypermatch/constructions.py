"""
Instance generators (complete graphs, the two extremal barriers, seeded
random instances) and the remove-one-add-two matcher.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .core import DegreeProfile, KPartiteHypergraph, greedy_matching, matching_vertices
from .errors import HypothesisUnmet, InvalidInput, InvariantViolation

__all__ = [
    "Construction",
    "SplitMix64",
    "complete",
    "divisibility_barrier",
    "divisibility_size_vectors",
    "space_barrier",
    "random_instance",
    "all_instances",
    "fact_1_5_matching",
]

RNG_NAME = "splitmix64/v1"
_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix generator (version 1 of the instance stream).

    State update ``s <- s + 0x9E3779B97F4A7C15 (mod 2**64)``; output is
    ``z = s; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
    z ^ z>>31`` (all mod 2**64). Any language reproduces it in a few lines.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def bernoulli(self, p: Fraction) -> bool:
        """True with probability ``p``: compares one draw with ``floor(p * 2**64)``."""
        return self.next_u64() < (p.numerator << 64) // p.denominator

    def below(self, bound: int) -> int:
        """Uniform-ish integer in ``[0, bound)`` by multiply-shift."""
        return (self.next_u64() * bound) >> 64


@dataclass(frozen=True)
class Construction:
    """A generated graph with the parameters and special sets that define it."""

    graph: KPartiteHypergraph
    name: str
    params: dict = field(default_factory=dict)
    a_sets: tuple = ()

    def metadata(self) -> dict:
        return {
            "construction": self.name,
            "parameters": self.params,
            "A_sets": [list(s) for s in self.a_sets],
        }

    def union_a(self) -> set:
        return {(c, p) for c, s in enumerate(self.a_sets) for p in s}


def _check_kn(k, n):
    if not isinstance(k, int) or k < 2:
        raise InvalidInput(f"k must be an integer >= 2, got {k!r}")
    if not isinstance(n, int) or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n!r}")


def complete(k: int, n: int) -> KPartiteHypergraph:
    """All ``n**k`` crossing tuples."""
    _check_kn(k, n)
    return KPartiteHypergraph.complete([n] * k)


def divisibility_size_vectors(k: int, n: int) -> list:
    """Every admissible ``|A_i|`` vector in lexicographic order.

    Entries lie in ``[n/2 - 1, n/2 + 1]`` (and in ``[0, n]``) and sum to an odd number.
    """
    lo = max(0, -(-(n - 2) // 2))
    hi = min(n, (n + 2) // 2)
    rng = range(lo, hi + 1)
    return [v for v in itertools.product(rng, repeat=k) if sum(v) % 2 == 1]


def divisibility_barrier(k: int, n: int, sizes=None) -> Construction:
    """Edges are crossing tuples meeting ``A_1 u ... u A_k`` an even number of times.

    ``A_i`` is the first ``sizes[i]`` positions of class ``i``. By default
    the admissible vector closest to ``(n/2, ..., n/2)`` in l1 distance is
    used, ties going to the lexicographically smallest.
    """
    _check_kn(k, n)
    admissible = divisibility_size_vectors(k, n)
    if sizes is None:
        if not admissible:
            raise InvalidInput(f"no admissible |A_i| vector for k={k}, n={n}")
        sizes = min(admissible, key=lambda v: (sum(abs(2 * x - n) for x in v), v))
    sizes = tuple(int(s) for s in sizes)
    if sizes not in admissible:
        raise InvalidInput(f"sizes {sizes!r} need entries in [n/2-1, n/2+1] and an odd sum")
    edges = [e for e in itertools.product(range(n), repeat=k)
             if sum(1 for c, p in enumerate(e) if p < sizes[c]) % 2 == 0]
    return Construction(
        KPartiteHypergraph([n] * k, edges),
        "divisibility",
        {"k": k, "n": n, "sizes": list(sizes)},
        tuple(tuple(range(s)) for s in sizes),
    )


def space_barrier(k: int, n: int, a) -> Construction:
    """Edges are crossing tuples meeting ``A_1 u ... u A_k`` with ``|A_i| = a_i``."""
    _check_kn(k, n)
    a = DegreeProfile(tuple(a))
    if len(a) != k or any(x > n for x in a):
        raise InvalidInput(f"profile {a.a!r} needs k={k} entries, each at most n={n}")
    edges = [e for e in itertools.product(range(n), repeat=k)
             if any(p < a[c] for c, p in enumerate(e))]
    return Construction(
        KPartiteHypergraph([n] * k, edges),
        "space",
        {"k": k, "n": n, "a": list(a)},
        tuple(tuple(range(x)) for x in a),
    )


def random_instance(k: int, n: int, a, density, seed: int) -> Construction:
    """Space barrier for ``a`` plus independent Bernoulli(``density``) edges.

    One 64-bit draw is consumed per crossing tuple in lexicographic order,
    whether or not the tuple is already a barrier edge, so the instance is
    a pure function of ``(k, n, a, density, seed)``.
    """
    base = space_barrier(k, n, a)
    p = Fraction(str(density)) if isinstance(density, float) else Fraction(density)
    if not 0 <= p <= 1:
        raise InvalidInput(f"density must lie in [0, 1], got {density!r}")
    rng = SplitMix64(seed)
    extra = [e for e in itertools.product(range(n), repeat=k) if rng.bernoulli(p)]
    return Construction(
        base.graph.with_edges(extra),
        "random",
        {"k": k, "n": n, "a": list(base.params["a"]), "density": str(p), "seed": int(seed),
         "rng": RNG_NAME},
        base.a_sets,
    )


def all_instances(k: int, n: int):
    """Yield every k-partite k-graph with classes of size ``n`` (``2**(n**k)`` of them).

    Instance ``i`` contains the ``j``-th lexicographic tuple iff bit ``j`` of ``i`` is set.
    """
    tuples = list(itertools.product(range(n), repeat=k))
    for mask in range(1 << len(tuples)):
        yield mask, KPartiteHypergraph([n] * k, [t for j, t in enumerate(tuples) if mask >> j & 1])


def _free_edges(H, free):
    return [e for e in H.edges if all((c, p) in free for c, p in enumerate(e))]


def _improving_move(H, M):
    """First move (lexicographic) that removes at most one edge of ``M`` and adds one more than it removes."""
    used = matching_vertices(M)
    free = {v for v in H.vertices() if v not in used}
    single = _free_edges(H, free)
    if single:
        return None, (single[0],)
    for e in sorted(M):
        pool = free | set(enumerate(e))
        cand = [f for f in _free_edges(H, pool) if f != e]
        for x, f in enumerate(cand):
            for g in cand[x + 1:]:
                if all(a != b for a, b in zip(f, g)):
                    return e, (f, g)
    return None


def fact_1_5_matching(H: KPartiteHypergraph, profile) -> list:
    """A matching of exactly ``min(n - k + 2, sum(profile))`` edges.

    Starts from the lexicographic greedy matching and, while it is short,
    applies the first improving move that drops at most one edge and adds
    at most two. Below the target such a move always exists when the
    profile is a valid codegree bound, so running out of moves raises
    :class:`InvariantViolation`.
    """
    profile = DegreeProfile(tuple(profile))
    if len(profile) != H.k:
        raise InvalidInput(f"profile has {len(profile)} entries, graph has k={H.k}")
    if not profile.dominated_by(H):
        raise HypothesisUnmet(
            f"profile {profile.a} exceeds computed codegrees {H.codegree_profile()}")
    n = H.n
    target = max(0, min(n - H.k + 2, profile.Q))
    M = sorted(greedy_matching(H))
    cap = max(1, n * profile.Q)
    steps = 0
    while len(M) < target:
        move = _improving_move(H, M)
        if move is None or steps >= cap:
            raise InvariantViolation(
                "no improving move below the target",
                {"matching": M, "target": target, "profile": profile.a, "steps": steps},
            )
        out, add = move
        M = sorted([e for e in M if e != out] + list(add))
        steps += 1
    return M[:target]
