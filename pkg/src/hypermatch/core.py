"""
k-partite k-graphs: edge storage, codegrees, link graphs and restriction.

Conventions used across the package:

* classes are numbered ``0 .. k-1``;
* a vertex is a pair ``(class_index, position)``;
* an edge (a full crossing tuple) is a length-``k`` tuple of positions,
  entry ``i`` being the vertex taken from class ``i``;
* a partial crossing tuple is a length-``k`` tuple holding ``None`` at the
  classes it avoids, e.g. ``(None, 1, 0)`` avoids class 0.

Restriction never renumbers positions: removed vertices are simply marked
dead, so tuples chosen before a restriction stay valid afterwards.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from collections.abc import Iterable, Sequence

from .errors import InvalidInput

__all__ = [
    "DegreeProfile",
    "KPartiteHypergraph",
    "validate_matching",
    "greedy_matching",
    "matching_vertices",
    "dumps",
    "loads",
    "load",
    "save",
]

Edge = tuple
Vertex = tuple


@dataclass(frozen=True)
class DegreeProfile:
    """Codegree lower bounds ``a[i]`` for each class ``i``.

    ``Q`` is the sum of all entries, ``q`` the sum of all but the first.
    Entries need not be sorted.
    """

    a: tuple

    def __post_init__(self):
        a = tuple(self.a)
        for x in a:
            if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                raise InvalidInput(f"profile entries must be non-negative integers, got {a!r}")
        object.__setattr__(self, "a", a)

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def Q(self) -> int:
        return sum(self.a)

    @property
    def q(self) -> int:
        return sum(self.a[1:])

    def __getitem__(self, i):
        return self.a[i]

    def __iter__(self):
        return iter(self.a)

    def __len__(self):
        return len(self.a)

    @classmethod
    def parse(cls, text: str) -> "DegreeProfile":
        """Parse ``"3,1,1"``."""
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip() != ""))
        except ValueError as exc:
            raise InvalidInput(f"cannot parse profile {text!r}") from exc

    @classmethod
    def of(cls, H: "KPartiteHypergraph") -> "DegreeProfile":
        """The largest profile ``H`` satisfies: its computed codegrees."""
        return cls(H.codegree_profile())

    def dominated_by(self, H: "KPartiteHypergraph") -> bool:
        return len(self.a) == H.k and all(x <= c for x, c in zip(self.a, H.codegree_profile()))


class KPartiteHypergraph:
    """An immutable k-partite k-graph.

    Parameters
    ----------
    class_sizes : sequence of int
        Declared size of each vertex class.
    edges : iterable of tuples
        Full crossing tuples; duplicates are rejected.
    removed : iterable of (class, position), optional
        Vertices marked dead. Edges through them are rejected.
    """

    __slots__ = ("_sizes", "_edges", "_sorted", "_alive", "_removed", "_nbhd", "_vdeg", "_codeg")

    def __init__(self, class_sizes: Sequence[int], edges: Iterable[Sequence[int]] = (),
                 removed: Iterable[Vertex] = ()):
        sizes = tuple(int(s) for s in class_sizes)
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise InvalidInput(f"class sizes must be positive, got {sizes!r}")
        k = len(sizes)
        dead = set()
        for v in removed:
            c, p = _check_vertex(sizes, v)
            dead.add((c, p))
        self._sizes = sizes
        self._removed = frozenset(dead)
        self._alive = tuple(
            tuple(p for p in range(sizes[c]) if (c, p) not in dead) for c in range(k)
        )
        store = set()
        for e in edges:
            e = tuple(e)
            if len(e) != k:
                raise InvalidInput(f"edge {e!r} does not have {k} entries")
            for c, p in enumerate(e):
                if isinstance(p, bool) or not isinstance(p, int) or not 0 <= p < sizes[c]:
                    raise InvalidInput(f"edge {e!r} out of bounds for class sizes {sizes!r}")
                if (c, p) in dead:
                    raise InvalidInput(f"edge {e!r} uses removed vertex {(c, p)!r}")
            if e in store:
                raise InvalidInput(f"duplicate edge {e!r}")
            store.add(e)
        self._edges = frozenset(store)
        self._sorted = tuple(sorted(store))
        nbhd = [dict() for _ in range(k)]
        for e in self._sorted:
            for i in range(k):
                key = e[:i] + (None,) + e[i + 1:]
                nbhd[i].setdefault(key, []).append(e[i])
        self._nbhd = [{key: tuple(v) for key, v in d.items()} for d in nbhd]
        self._vdeg = None
        self._codeg = None

    # basic accessors -------------------------------------------------

    @property
    def k(self) -> int:
        return len(self._sizes)

    @property
    def class_sizes(self) -> tuple:
        return self._sizes

    @property
    def edges(self) -> tuple:
        """All edges in lexicographic order."""
        return self._sorted

    @property
    def removed(self) -> frozenset:
        return self._removed

    @property
    def n(self) -> int:
        """Smallest number of live vertices in any class."""
        return min(len(a) for a in self._alive)

    def alive(self, c: int) -> tuple:
        """Live positions of class ``c`` in increasing order."""
        return self._alive[c]

    def is_alive(self, v: Vertex) -> bool:
        return v not in self._removed

    def vertices(self) -> list:
        return [(c, p) for c in range(self.k) for p in self._alive[c]]

    def num_edges(self) -> int:
        return len(self._sorted)

    def has_edge(self, e) -> bool:
        return tuple(e) in self._edges

    def __contains__(self, e) -> bool:
        return self.has_edge(e)

    def __eq__(self, other):
        if not isinstance(other, KPartiteHypergraph):
            return NotImplemented
        return (self._sizes == other._sizes and self._edges == other._edges
                and self._removed == other._removed)

    def __hash__(self):
        return hash((self._sizes, self._edges, self._removed))

    def __repr__(self):
        return f"KPartiteHypergraph(k={self.k}, class_sizes={self._sizes}, edges={len(self._sorted)})"

    # degrees ---------------------------------------------------------

    def _avoided(self, S) -> int:
        S = tuple(S)
        if len(S) != self.k:
            raise InvalidInput(f"tuple {S!r} must have {self.k} entries (None marks the avoided class)")
        holes = [i for i, p in enumerate(S) if p is None]
        if len(holes) != 1:
            raise InvalidInput(f"tuple {S!r} must avoid exactly one class")
        for c, p in enumerate(S):
            if p is not None and (isinstance(p, bool) or not isinstance(p, int)
                                  or not 0 <= p < self._sizes[c]):
                raise InvalidInput(f"tuple {S!r} out of bounds for class sizes {self._sizes!r}")
        return holes[0]

    def neighbourhood(self, S) -> tuple:
        """Positions completing the (k-1)-tuple ``S`` to an edge, sorted."""
        i = self._avoided(S)
        return self._nbhd[i].get(tuple(S), ())

    def degree(self, S) -> int:
        """Number of edges containing the crossing (k-1)-tuple ``S``."""
        return len(self.neighbourhood(S))

    def tuples_avoiding(self, i: int):
        """All live crossing (k-1)-tuples avoiding class ``i``, lexicographically."""
        pools = [(None,) if c == i else self._alive[c] for c in range(self.k)]
        return itertools.product(*pools)

    def min_codegree_into(self, i: int) -> int:
        """Minimum over live crossing (k-1)-tuples avoiding class ``i`` of their degree.

        With no such tuple the minimum is vacuous and the number of live
        vertices of class ``i`` is returned.
        """
        if not isinstance(i, int) or not 0 <= i < self.k:
            raise InvalidInput(f"class index {i!r} out of range for k={self.k}")
        if self._codeg is None:
            self._codeg = [None] * self.k
        if self._codeg[i] is None:
            table = self._nbhd[i]
            best = len(self._alive[i])
            for S in self.tuples_avoiding(i):
                d = len(table.get(S, ()))
                if d < best:
                    best = d
                    if best == 0:
                        break
            self._codeg[i] = best
        return self._codeg[i]

    def codegree_profile(self) -> tuple:
        return tuple(self.min_codegree_into(i) for i in range(self.k))

    def vertex_degree(self, v: Vertex) -> int:
        """Number of edges containing vertex ``v``."""
        if self._vdeg is None:
            counts = {}
            for e in self._sorted:
                for c, p in enumerate(e):
                    counts[(c, p)] = counts.get((c, p), 0) + 1
            self._vdeg = counts
        return self._vdeg.get(tuple(v), 0)

    # derived graphs --------------------------------------------------

    def link_graph(self, v: Vertex) -> "KPartiteHypergraph":
        """Link graph of a class-0 vertex: a (k-1)-graph on classes 1..k-1.

        Class ``j`` of the result is class ``j+1`` of this graph.
        """
        c, p = _check_vertex(self._sizes, v)
        if c != 0:
            raise InvalidInput(f"link graphs are taken at class-0 vertices, got {v!r}")
        if self.k < 2:
            raise InvalidInput("link graph needs k >= 2")
        removed = [(cc - 1, pp) for (cc, pp) in self._removed if cc != 0]
        edges = [e[1:] for e in self._sorted if e[0] == p]
        return KPartiteHypergraph(self._sizes[1:], edges, removed)

    def induced(self, removed: Iterable[Vertex]) -> "KPartiteHypergraph":
        """Delete vertices, keeping only edges that avoid them. Positions are kept."""
        gone = set(self._removed)
        for v in removed:
            gone.add(_check_vertex(self._sizes, v))
        edges = [e for e in self._sorted if not any((c, p) in gone for c, p in enumerate(e))]
        return KPartiteHypergraph(self._sizes, edges, gone)

    def with_edges(self, extra: Iterable[Sequence[int]]) -> "KPartiteHypergraph":
        """A copy with ``extra`` edges added (already-present ones are ignored)."""
        edges = set(self._edges)
        edges.update(tuple(e) for e in extra)
        return KPartiteHypergraph(self._sizes, edges, self._removed)

    def permute_classes(self, perm: Sequence[int]) -> "KPartiteHypergraph":
        """Relabel classes so that new class ``i`` is old class ``perm[i]``."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.k)):
            raise InvalidInput(f"{perm!r} is not a permutation of range({self.k})")
        inverse = {old: new for new, old in enumerate(perm)}
        sizes = [self._sizes[perm[i]] for i in range(self.k)]
        edges = [tuple(e[perm[i]] for i in range(self.k)) for e in self._sorted]
        removed = [(inverse[c], p) for c, p in self._removed]
        return KPartiteHypergraph(sizes, edges, removed)

    # serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        out = {"k": self.k, "class_sizes": list(self._sizes), "edges": [list(e) for e in self._sorted]}
        if self._removed:
            out["removed"] = [list(v) for v in sorted(self._removed)]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "KPartiteHypergraph":
        try:
            k = data["k"]
            sizes = data["class_sizes"]
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"instance is missing a field: {exc}") from exc
        if not isinstance(k, int) or len(sizes) != k:
            raise InvalidInput("k does not match the number of class sizes")
        return cls(sizes, (tuple(e) for e in edges), (tuple(v) for v in data.get("removed", ())))

    @classmethod
    def complete(cls, class_sizes: Sequence[int]) -> "KPartiteHypergraph":
        return cls(class_sizes, itertools.product(*(range(s) for s in class_sizes)))


def _check_vertex(sizes, v) -> tuple:
    try:
        c, p = v
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"vertex must be a (class, position) pair, got {v!r}") from exc
    if not 0 <= c < len(sizes) or not 0 <= p < sizes[c]:
        raise InvalidInput(f"vertex {v!r} out of bounds for class sizes {sizes!r}")
    return (c, p)


def matching_vertices(edges: Iterable[Edge]) -> set:
    """Vertex set ``V(M)`` of a collection of edges."""
    return {(c, p) for e in edges for c, p in enumerate(e)}


def validate_matching(H: KPartiteHypergraph, M: Iterable[Edge]):
    """Check that ``M`` is a matching of ``H``.

    Returns ``(True, None)`` or ``(False, violation)`` where ``violation``
    describes the first problem met when scanning ``M`` in sorted order:
    ``{"kind": "non_edge", "edge": e}`` or
    ``{"kind": "overlap", "edges": (e1, e2), "vertex": v}``.
    """
    seen = {}
    for e in sorted(tuple(x) for x in M):
        if not H.has_edge(e):
            return False, {"kind": "non_edge", "edge": e}
        for c, p in enumerate(e):
            if (c, p) in seen:
                return False, {"kind": "overlap", "edges": (seen[(c, p)], e), "vertex": (c, p)}
        for c, p in enumerate(e):
            seen[(c, p)] = e
    return True, None


def greedy_matching(H: KPartiteHypergraph, blocked: Iterable[Vertex] = ()) -> list:
    """Maximal matching built by scanning edges in lexicographic order."""
    used = set(blocked)
    out = []
    for e in H.edges:
        if all((c, p) not in used for c, p in enumerate(e)):
            out.append(e)
            used.update(enumerate(e))
    return out


def dumps(H: KPartiteHypergraph) -> str:
    """Canonical instance text: compact JSON, sorted edges, no trailing whitespace."""
    return json.dumps(H.to_dict(), separators=(",", ":"), ensure_ascii=False)


def loads(text: str) -> KPartiteHypergraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"instance is not valid JSON: {exc}") from exc
    return KPartiteHypergraph.from_dict(data)


def load(path) -> KPartiteHypergraph:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(H: KPartiteHypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(H))
