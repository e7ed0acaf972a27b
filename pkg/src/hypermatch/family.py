"""
Families of k-partite k-graphs on shared classes, and rainbow matchings in them.

A rainbow matching is a dict ``{colour: edge}`` where ``colour`` indexes
``family.members``; edges must be pairwise disjoint and each must be an
edge of its colour's graph.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

from .core import KPartiteHypergraph
from .errors import InvalidInput

__all__ = [
    "HypergraphFamily",
    "multiplicity",
    "min_multiplicity",
    "validate_rainbow",
    "rainbow_vertices",
    "rainbow_to_json",
    "rainbow_from_json",
    "family_dumps",
    "family_loads",
    "load_family",
]

DEFAULT_TUPLE_BUDGET = 200_000


@dataclass(frozen=True)
class HypergraphFamily:
    members: tuple
    declared_m: int | None = None

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if members:
            sizes, removed = members[0].class_sizes, members[0].removed
            for H in members[1:]:
                if H.class_sizes != sizes:
                    raise InvalidInput("family members must share class sizes")
                if H.removed != removed:
                    raise InvalidInput("family members must share their live vertex sets")
        if self.declared_m is not None and self.declared_m < 0:
            raise InvalidInput("declared multiplicity must be non-negative")

    @property
    def t(self) -> int:
        return len(self.members)

    @property
    def k(self) -> int:
        return self.members[0].k if self.members else 0

    @property
    def class_sizes(self) -> tuple:
        return self.members[0].class_sizes if self.members else ()

    def __len__(self):
        return len(self.members)

    def __getitem__(self, j):
        return self.members[j]

    def induced(self, removed) -> "HypergraphFamily":
        removed = list(removed)
        return HypergraphFamily(tuple(H.induced(removed) for H in self.members), self.declared_m)

    def codegree_profile(self) -> tuple:
        """Componentwise minimum codegrees over all members."""
        if not self.members:
            return ()
        profiles = [H.codegree_profile() for H in self.members]
        return tuple(min(col) for col in zip(*profiles))


def multiplicity(F: HypergraphFamily, e) -> int:
    """Number of members containing the crossing tuple ``e``."""
    e = tuple(e)
    if F.members and (len(e) != F.k or any(not 0 <= p < s for p, s in zip(e, F.class_sizes))):
        raise InvalidInput(f"tuple {e!r} out of bounds")
    return sum(1 for H in F.members if H.has_edge(e))


def min_multiplicity(F: HypergraphFamily, budget: int = DEFAULT_TUPLE_BUDGET) -> int:
    """Minimum multiplicity over all live crossing tuples.

    Refuses (``InvalidInput``) when the number of tuples exceeds ``budget``;
    callers then have to rely on a declared bound.
    """
    if not F.members:
        return 0
    H0 = F.members[0]
    pools = [H0.alive(c) for c in range(H0.k)]
    total = math.prod(len(p) for p in pools)
    if total > budget:
        raise InvalidInput(f"{total} crossing tuples exceed the enumeration budget {budget}")
    best = F.t
    for e in itertools.product(*pools):
        m = sum(1 for H in F.members if H.has_edge(e))
        if m < best:
            best = m
            if best == 0:
                break
    return best


def rainbow_vertices(M: dict) -> set:
    return {(c, p) for e in M.values() for c, p in enumerate(e)}


def validate_rainbow(F: HypergraphFamily, M: dict):
    """``(True, None)`` or ``(False, violation)`` for the first problem in colour order.

    Violations: ``bad_colour``, ``non_edge`` (edge missing from its
    colour's graph) and ``overlap``. Colour injectivity is structural
    since ``M`` is keyed by colour.
    """
    seen = {}
    for j in sorted(M):
        e = tuple(M[j])
        if not isinstance(j, int) or not 0 <= j < F.t:
            return False, {"kind": "bad_colour", "colour": j}
        if not F.members[j].has_edge(e):
            return False, {"kind": "non_edge", "colour": j, "edge": e}
        for c, p in enumerate(e):
            if (c, p) in seen:
                return False, {"kind": "overlap", "colours": (seen[(c, p)], j), "vertex": (c, p)}
        for c, p in enumerate(e):
            seen[(c, p)] = j
    return True, None


def rainbow_to_json(M: dict) -> list:
    return [{"colour": j, "edge": list(M[j])} for j in sorted(M)]


def rainbow_from_json(rows) -> dict:
    """Inverse of :func:`rainbow_to_json`; a repeated colour is an error."""
    out = {}
    for row in rows:
        j = row["colour"]
        if j in out:
            raise InvalidInput(f"colour {j} used twice")
        out[j] = tuple(row["edge"])
    return out


def family_dumps(F: HypergraphFamily) -> str:
    data = {
        "k": F.k,
        "class_sizes": list(F.class_sizes),
        "members": [[list(e) for e in H.edges] for H in F.members],
    }
    return json.dumps(data, separators=(",", ":"))


def family_loads(text: str) -> HypergraphFamily:
    try:
        data = json.loads(text)
        k, sizes, members = data["k"], data["class_sizes"], data["members"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed family file: {exc}") from exc
    if len(sizes) != k:
        raise InvalidInput("k does not match the number of class sizes")
    return HypergraphFamily(tuple(KPartiteHypergraph(sizes, (tuple(e) for e in m)) for m in members))


def load_family(path) -> HypergraphFamily:
    with open(path, encoding="utf-8") as fh:
        return family_loads(fh.read())
