"""Naive reference computations by plain enumeration, sharing no code with the solvers."""

import itertools


def disjoint(edges):
    seen = set()
    for e in edges:
        for c, p in enumerate(e):
            if (c, p) in seen:
                return False
            seen.add((c, p))
    return True


def matching_number(edges):
    edges = list(edges)
    best = 0
    for r in range(1, len(edges) + 1):
        if any(disjoint(combo) for combo in itertools.combinations(edges, r)):
            best = r
        else:
            break
    return best


def rainbow_number(members):
    """members: list of edge lists. Largest rainbow matching by trying colour subsets and edge choices."""
    t = len(members)
    best = 0
    for r in range(1, t + 1):
        found = False
        for colours in itertools.combinations(range(t), r):
            for choice in itertools.product(*(members[j] for j in colours)):
                if disjoint(choice):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = r
    return best


def min_dominating(edges, vertices):
    edges = list(edges)
    for r in range(len(vertices) + 1):
        for D in itertools.combinations(vertices, r):
            Ds = set(D)
            if all(any((c, p) in Ds for c, p in enumerate(e)) for e in edges):
                return r
    return None


def codegree(edges, sizes, i):
    """Minimum, over crossing tuples avoiding class i, of the number of completions."""
    es = set(map(tuple, edges))
    k = len(sizes)
    best = None
    others = [range(sizes[c]) for c in range(k) if c != i]
    for rest in itertools.product(*others):
        count = 0
        for v in range(sizes[i]):
            e = list(rest)
            e.insert(i, v)
            if tuple(e) in es:
                count += 1
        best = count if best is None else min(best, count)
    return best


def bipartite_matching_number(left, right, edges):
    edges = list(edges)
    best = 0
    for r in range(1, min(left, right) + 1):
        ok = False
        for combo in itertools.combinations(edges, r):
            if len({u for u, _ in combo}) == r and len({v for _, v in combo}) == r:
                ok = True
                break
        if not ok:
            break
        best = r
    return best
