"""
Matchings of size ``min(n, Q)`` through link graphs of the largest class,
plus the oracle sweep that compares matching numbers with the known bounds.

The pipeline, on a graph whose classes are relabelled so the profile is
non-increasing:

1. shrink the profile so that ``Q <= n``;
2. if ``Q <= n - k + 2`` use the remove-one-add-two matcher;
3. otherwise fix the diagonal perfect matching ``M`` of the complete
   (k-1)-partite graph on classes ``1..k-1``, choose a set ``X`` of
   class-0 vertices whose links contain many edges of ``M``, find a
   rainbow matching among the links of a second set of class-0 vertices
   ``Z``, and join everything with one bipartite matching between
   ``X u Z`` and a perfect matching ``M*`` that contains the rainbow edges.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool

from .bipartite import BipartiteGraph, as_fraction, max_bip_matching
from .constructions import (
    all_instances,
    complete,
    divisibility_barrier,
    divisibility_size_vectors,
    fact_1_5_matching,
    random_instance,
    space_barrier,
)
from .core import DegreeProfile, KPartiteHypergraph, validate_matching
from .errors import HypothesisUnmet, InvalidInput, InvariantViolation
from .family import HypergraphFamily
from .oracles import OracleBudget, max_matching_exact, verify_theorem_bound
from .rainbow import BEST_EFFORT, GUARANTEED, RainbowConfig, rainbow_m_plus_q

__all__ = [
    "DriverConfig",
    "DriverReport",
    "prop_3_1_count",
    "good_set_32",
    "link_counts",
    "theorem_1_7",
    "sweep_instances",
    "verify_main_theorem_sweep",
    "load_sweep_spec",
    "write_sweep",
]


@dataclass(frozen=True)
class DriverConfig:
    mode: str = BEST_EFFORT
    branch_threshold: int | None = None  # default 400 k^2
    force_branch: str | None = None  # "large_q" or "small_q"
    budget: OracleBudget = field(default_factory=lambda: OracleBudget(200_000, 10.0))
    hall_samples: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (GUARANTEED, BEST_EFFORT):
            raise InvalidInput(f"unknown mode {self.mode!r}")
        if self.force_branch not in (None, "large_q", "small_q"):
            raise InvalidInput(f"unknown branch {self.force_branch!r}")

    @property
    def guaranteed(self) -> bool:
        return self.mode == GUARANTEED

    def rainbow(self) -> RainbowConfig:
        return RainbowConfig(self.mode, budget=self.budget, seed=self.seed)


@dataclass
class DriverReport:
    regime: str
    branch: str
    target: int
    matching: list
    status: str
    permutation: tuple
    profile: tuple
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "branch": self.branch,
            "target": self.target,
            "achieved": len(self.matching),
            "status": self.status,
            "permutation": list(self.permutation),
            "profile": list(self.profile),
            "matching": [list(e) for e in self.matching],
            "trace": self.trace,
        }


# ---------------------------------------------------------------------------
# link-count propositions


def prop_3_1_count(H: KPartiteHypergraph, U, f, a1: int) -> int:
    """Number of ``v in U`` (class 0) whose link contains ``f``; at least ``|U| - (n - a1)``.

    ``f`` is a (k-1)-tuple of positions in classes ``1..k-1``.
    """
    f = tuple(f)
    if len(f) != H.k - 1:
        raise InvalidInput(f"f must have {H.k - 1} entries")
    U = sorted(set(U))
    nbrs = set(H.neighbourhood((None,) + f))
    count = sum(1 for v in U if v in nbrs)
    n = len(H.alive(0))
    if count < len(U) - (n - a1):
        raise InvariantViolation("link count below |U| - (n - a1); a1 is overstated",
                                 {"U": U, "f": f, "a1": a1, "count": count})
    return count


def link_counts(H: KPartiteHypergraph, M) -> dict:
    """``{u: |L_u(H) n M|}`` for each class-0 position ``u``."""
    out = {u: 0 for u in H.alive(0)}
    for f in M:
        for u in H.neighbourhood((None,) + tuple(f)):
            out[u] += 1
    return out


def _sorted_profile(profile):
    a = tuple(profile)
    return all(a[i] >= a[i + 1] for i in range(len(a) - 1))


def good_set_32(H: KPartiteHypergraph, profile, M, variant: str, epsilon=None,
                mode: str = BEST_EFFORT) -> list:
    """Class-0 vertices whose links contain many edges of the perfect matching ``M``.

    Variant ``"i"`` keeps ``u`` with ``|L_u n M| >= (1+eps) k q``; variant
    ``"ii"`` keeps ``u`` with ``|L_u n M| >= n - a1 + (k-1) q``, where
    ``q = a2 + ... + ak``. The guaranteed regime checks the ranges
    ``2k/eps <= q <= eps n/(8k)`` (i) or ``(k+1) q^2 <= n`` and
    ``k (q+k)(q+1) <= n`` (ii), and asserts ``|U| >= n - (1+eps) q`` or
    ``|U| >= a1``.
    """
    profile = DegreeProfile(tuple(profile))
    k = H.k
    n = len(H.alive(0))
    a1, q = profile[0], profile.q
    if variant not in ("i", "ii"):
        raise InvalidInput(f"variant must be 'i' or 'ii', got {variant!r}")
    if len(profile) != k:
        raise InvalidInput("profile length does not match k")
    eps = as_fraction(epsilon) if epsilon is not None else Fraction(1, 200 * k)
    if mode == GUARANTEED:
        if not _sorted_profile(profile):
            raise HypothesisUnmet("profile must be non-increasing")
        if profile.Q <= n - k:
            raise HypothesisUnmet("need a1 + ... + ak > n - k")
        if not profile.dominated_by(H):
            raise HypothesisUnmet("profile exceeds computed codegrees")
        if variant == "i" and not (2 * k / eps <= q <= eps * n / (8 * k)):
            raise HypothesisUnmet(f"q = {q} outside [2k/eps, eps n/8k]")
        if variant == "ii" and ((k + 1) * q * q > n or k * (q + k) * (q + 1) > n):
            raise HypothesisUnmet(f"q = {q} too large for n = {n}")
    counts = link_counts(H, M)
    if variant == "i":
        U = [u for u, c in sorted(counts.items()) if c >= (1 + eps) * k * q]
        if mode == GUARANTEED and len(U) < n - (1 + eps) * q:
            raise InvariantViolation("good set smaller than n - (1+eps) q", {"U": U, "q": q})
    else:
        U = [u for u, c in sorted(counts.items()) if c >= n - a1 + (k - 1) * q]
        if mode == GUARANTEED and len(U) < a1:
            raise InvariantViolation("good set smaller than a1", {"U": U, "a1": a1})
    return U


# ---------------------------------------------------------------------------
# the pipeline


def _reduce(a, n):
    """Lower the largest entries until the sum is at most ``n``."""
    a = list(a)
    excess = sum(a) - n
    for i in sorted(range(len(a)), key=lambda x: (-a[x], x)):
        if excess <= 0:
            break
        cut = min(a[i], excess)
        a[i] -= cut
        excess -= cut
    return tuple(a)


def _unpermute(e, perm):
    out = [None] * len(perm)
    for i, old in enumerate(perm):
        out[old] = e[i]
    return tuple(out)


def _complete_matching(parts, n, k):
    """Extend disjoint (k-1)-tuples on classes ``1..k-1`` to a perfect matching, smallest free vertices first."""
    used = [set() for _ in range(k - 1)]
    for f in parts:
        for c, p in enumerate(f):
            used[c].add(p)
    free = [[p for p in range(n) if p not in used[c]] for c in range(k - 1)]
    extra = [tuple(free[c][r] for c in range(k - 1)) for r in range(n - len(parts))]
    return sorted(list(parts) + extra)


def _hall_diagnostics(B, X_idx, Z_psi, n, a1, degree_floor, samples, seed):
    """Problems found by the three Hall case checks, plus sampled Hall checks."""
    problems = []
    left = B.left_size
    right_nbrs = [set() for _ in range(B.right_size)]
    for u, row in enumerate(B.adjacency):
        for f in row:
            right_nbrs[f].add(u)
    # large S: every f has at most n - a1 non-neighbours among U*
    for f in range(B.right_size):
        if left - len(right_nbrs[f]) > n - a1:
            problems.append({"check": "large_sets", "f": f, "non_neighbours": left - len(right_nbrs[f])})
            break
    for u in X_idx:
        if B.degree(u) < degree_floor:
            problems.append({"check": "x_degree", "u": u, "degree": B.degree(u), "need": str(degree_floor)})
            break
    for u, f in Z_psi:
        if f not in B.adjacency[u]:
            problems.append({"check": "rainbow_pairs", "u": u, "f": f})
            break
    rng = random.Random(seed)
    for _ in range(samples if left else 0):
        size = rng.randint(1, left)
        S = rng.sample(range(left), size)
        if len(B.neighbours(S)) < size:
            problems.append({"check": "sampled_hall", "S": sorted(S)})
            break
    return problems


def theorem_1_7(H: KPartiteHypergraph, profile, config: DriverConfig = DriverConfig()) -> DriverReport:
    """A matching of ``min(n, Q)`` edges given codegrees at least ``profile``.

    The guaranteed regime additionally requires ``k >= 3`` and
    ``a2 + ... + ak <= n / (1600 k^4)`` after sorting, and raises
    ``InvariantViolation`` on any failed stage. Best effort records the
    failing stage in the trace and returns the larger of the partial
    result and the remove-one-add-two matching.
    """
    k = H.k
    profile = DegreeProfile(tuple(profile))
    if len(profile) != k:
        raise InvalidInput(f"profile has {len(profile)} entries, graph has k={k}")
    if H.removed or len(set(H.class_sizes)) != 1:
        raise InvalidInput("classes must have equal size with no removed vertices")
    if not profile.dominated_by(H):
        raise HypothesisUnmet(f"profile {profile.a} exceeds codegrees {H.codegree_profile()}")
    n = H.class_sizes[0]
    reduced = _reduce(profile.a, n)
    perm = tuple(sorted(range(k), key=lambda i: (-reduced[i], i)))
    a = tuple(reduced[i] for i in perm)
    Q = sum(a)
    trace = [{"stage": "reduce", "profile": list(profile.a), "reduced": list(reduced), "sorted": list(a)}]

    def report(branch, M, status):
        return DriverReport(config.mode, branch, Q, sorted(M), status, perm, a, trace)

    if Q <= n - k + 2 and config.force_branch is None:
        M = fact_1_5_matching(H, reduced)
        return report("fact_1_5", M, "success" if len(M) == Q else "shortfall")

    a1, q = a[0], sum(a[1:])
    threshold = config.branch_threshold if config.branch_threshold is not None else 400 * k * k
    branch = config.force_branch or ("large_q" if q >= threshold else "small_q")
    trace.append({"stage": "branch", "branch": branch, "q": q, "a1": a1, "threshold": threshold,
                  "forced": config.force_branch is not None})
    if config.guaranteed:
        if k < 3:
            raise HypothesisUnmet("the link-graph pipeline needs k >= 3")
        if 1600 * k ** 4 * q > n:
            raise HypothesisUnmet(f"q = {q} exceeds n/(1600k^4)")

    Hp = H.permute_classes(perm)
    diag = [(r,) * (k - 1) for r in range(n)]
    try:
        M = _pipeline(Hp, a, n, k, branch, diag, config, trace)
    except _Shortfall as exc:
        trace.append({"stage": "shortfall", "reason": str(exc)})
        M = exc.partial
    M = [_unpermute(e, perm) for e in M]
    ok, bad = validate_matching(H, M)
    if not ok:
        raise InvariantViolation("assembled matching is invalid", {"violation": bad, "trace": trace})
    if len(M) > Q:
        M = sorted(M)[:Q]
    if len(M) == Q:
        return report(branch, M, "success")
    if config.guaranteed:
        raise InvariantViolation("pipeline fell short", {"achieved": len(M), "target": Q, "trace": trace})
    fallback = fact_1_5_matching(H, reduced)
    trace.append({"stage": "fallback", "size": len(fallback)})
    best = fallback if len(fallback) > len(M) else M
    return report(branch, best, "success" if len(best) == Q else "shortfall")


class _Shortfall(Exception):
    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)


def _pad(Hp, X, a1, diag, config, trace):
    """Best effort: top up ``X`` to ``a1`` vertices by link count, largest first."""
    if config.guaranteed or len(X) >= a1:
        return sorted(X)
    counts = link_counts(Hp, diag)
    chosen = set(X)
    extra = sorted((u for u in counts if u not in chosen), key=lambda u: (-counts[u], u))[:a1 - len(X)]
    trace.append({"stage": "pad_X", "filtered": len(X), "added": len(extra)})
    return sorted(chosen | set(extra))


def _pipeline(Hp, a, n, k, branch, diag, config, trace):
    a1, q = a[0], sum(a[1:])
    mode = config.mode
    eps = Fraction(1, 200 * k)

    def stage_fail(message, state=None):
        if config.guaranteed:
            raise InvariantViolation(message, state or {})
        raise _Shortfall(message)

    if branch == "large_q":
        U = good_set_32(Hp, a, diag, "i", eps, mode)
        X = _pad(Hp, U[:a1], a1, diag, config, trace)
        Xs = set(X)
        Y = [u for u in Hp.alive(0) if u not in Xs]
        m = len(Y) - (n - a1)
        trace.append({"stage": "good_set", "X": len(X), "Y": len(Y), "m": m})
        colours = Y
        degree_floor = max((1 + eps) * q, n - a1) if config.guaranteed else n - a1
    else:
        U = good_set_32(Hp, a, diag, "ii", None, mode)
        X = _pad(Hp, U[:a1], a1, diag, config, trace)
        if len(X) < a1:
            trace.append({"stage": "good_set", "X": len(X), "need": a1})
            if config.guaranteed:
                raise InvariantViolation("good set smaller than a1", {"X": X})
        Xs = set(X)
        colours = [u for u in Hp.alive(0) if u not in Xs][:q]
        m = 0
        trace.append({"stage": "good_set", "X": len(X), "Z_candidates": len(colours)})
        degree_floor = n - a1

    links = HypergraphFamily(tuple(Hp.link_graph((0, u)) for u in colours))
    rainbow = None
    if m + q <= len(colours):
        try:
            rainbow = rainbow_m_plus_q(links, a[1:], m, config.rainbow())
        except HypothesisUnmet as exc:
            if config.guaranteed:
                raise
            trace.append({"stage": "rainbow", "error": str(exc)})
    else:
        trace.append({"stage": "rainbow", "error": f"only {len(colours)} colours for m+q = {m + q}"})
    R = rainbow.matching if rainbow is not None else {}
    if rainbow is not None:
        trace.append({"stage": "rainbow", "status": rainbow.status, "size": rainbow.achieved,
                      "target": rainbow.target})
    Z = [colours[j] for j in sorted(R)]
    psi = {colours[j]: tuple(R[j]) for j in R}
    if branch == "large_q" and config.guaranteed and len(X) + len(Z) != a1 + q:
        raise InvariantViolation("|X| + |Z| differs from a1 + q", {"X": len(X), "Z": len(Z)})

    rainbow_vertices = {(c, p) for f in psi.values() for c, p in enumerate(f)}
    M_prime = [f for f in diag if not any((c, p) in rainbow_vertices for c, p in enumerate(f))]
    M_star = _complete_matching(M_prime + list(psi.values()), n, k)
    U_star = sorted(set(X) | set(Z))
    index_f = {f: x for x, f in enumerate(M_star)}
    rows = [tuple(x for x, f in enumerate(M_star) if Hp.has_edge((u,) + f)) for u in U_star]
    B = BipartiteGraph(len(U_star), len(M_star), tuple(rows))
    pos = {u: x for x, u in enumerate(U_star)}
    problems = _hall_diagnostics(B, [pos[u] for u in X], [(pos[z], index_f[f]) for z, f in psi.items()],
                                 n, a1, degree_floor, config.hall_samples, config.seed)
    trace.append({"stage": "assembly", "U_star": len(U_star), "M_star": len(M_star),
                  "diagnostics": problems})
    if problems and config.guaranteed:
        raise InvariantViolation("Hall diagnostics failed", {"problems": problems})
    MB = max_bip_matching(B)
    final = [(U_star[u],) + M_star[f] for u, f in MB]
    trace.append({"stage": "hall", "matched": len(MB), "left": len(U_star)})
    if len(MB) < len(U_star) or len(U_star) < a1 + q:
        message = "auxiliary graph not saturated" if len(MB) < len(U_star) else "U* smaller than a1 + q"
        if config.guaranteed:
            raise InvariantViolation(message, {"matched": len(MB), "U_star": len(U_star)})
        raise _Shortfall(message, final)
    return final


# ---------------------------------------------------------------------------
# oracle sweep


def _profile_text(a):
    return ".".join(str(x) for x in a)


def sweep_instances(spec: dict):
    """Yield ``(instance_id, graph)`` for every grid entry of a sweep spec, in order.

    Grid entries (``n`` may be an int or a list):

    * ``{"generator": "exhaustive", "k": 3, "n": 2}``
    * ``{"generator": "complete", "k": 3, "n": [2, 3]}``
    * ``{"generator": "divisibility", "k": 3, "n": [2, 4]}`` (all admissible size vectors)
    * ``{"generator": "space", "k": 3, "n": 4, "profiles": [[1, 1, 1]]}``
      (``"profiles": "all"`` means every profile with sum at most ``n``)
    * ``{"generator": "random", "k": 3, "n": [3, 4], "a": [1, 0, 0], "density": "1/2", "seeds": [0, 1]}``
      (``"seeds": {"start": 0, "count": 100}`` is also accepted)
    """
    grid = spec.get("grid", [])
    if not isinstance(grid, list):
        raise InvalidInput("sweep spec needs a list under 'grid'")
    index = itertools.count()
    for entry in grid:
        try:
            gen = entry["generator"]
            k = int(entry["k"])
            ns = entry["n"] if isinstance(entry["n"], list) else [entry["n"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad grid entry {entry!r}: {exc}") from exc
        for n in ns:
            n = int(n)
            if gen == "exhaustive":
                for mask, H in all_instances(k, n):
                    yield f"{next(index):07d}-exhaustive-k{k}-n{n}-{mask:06d}", H
            elif gen == "complete":
                yield f"{next(index):07d}-complete-k{k}-n{n}", complete(k, n)
            elif gen == "divisibility":
                for sizes in divisibility_size_vectors(k, n):
                    c = divisibility_barrier(k, n, sizes)
                    yield f"{next(index):07d}-divisibility-k{k}-n{n}-{_profile_text(sizes)}", c.graph
            elif gen == "space":
                profiles = entry.get("profiles", "all")
                if profiles == "all":
                    profiles = [p for p in itertools.product(range(n + 1), repeat=k) if sum(p) <= n]
                for p in profiles:
                    c = space_barrier(k, n, p)
                    yield f"{next(index):07d}-space-k{k}-n{n}-{_profile_text(p)}", c.graph
            elif gen == "random":
                seeds = entry.get("seeds", [0])
                if isinstance(seeds, dict):
                    seeds = range(int(seeds.get("start", 0)), int(seeds.get("start", 0)) + int(seeds["count"]))
                a = entry.get("a", [0] * k)
                density = Fraction(str(entry.get("density", "1/2")))
                for s in seeds:
                    c = random_instance(k, n, a, density, int(s))
                    yield (f"{next(index):07d}-random-k{k}-n{n}-a{_profile_text(a)}-s{int(s):06d}",
                           c.graph)
            else:
                raise InvalidInput(f"unknown generator {gen!r}")


def _sweep_one(args):
    instance_id, data, budget, with_driver = args
    H = KPartiteHypergraph.from_dict(data)
    a = H.codegree_profile()
    Q = sum(a)
    n = H.n
    row = {"instance_id": instance_id, "k": H.k, "n": n, "profile": list(a), "Q": Q}
    res = max_matching_exact(H, budget)
    nu = res.value
    row["nu"] = nu
    row["oracle"] = res.status
    main = verify_theorem_bound(H, a, "thm_main", budget, instance_id)
    fact = verify_theorem_bound(H, a, "fact_1_5", budget, instance_id)
    row["bound"] = main["bound"]
    row["thm_main"] = main["status"]
    row["fact_1_5"] = fact["status"]
    try:
        M = fact_1_5_matching(H, a)
        row["fact_1_5_matching"] = len(M) == fact["bound"]
    except InvariantViolation:
        row["fact_1_5_matching"] = False
    if with_driver:
        try:
            rep = theorem_1_7(H, a, DriverConfig(budget=budget))
            row["driver"] = {"branch": rep.branch, "status": rep.status, "target": rep.target,
                             "achieved": len(rep.matching)}
        except (InvariantViolation, HypothesisUnmet, InvalidInput) as exc:
            row["driver"] = {"error": type(exc).__name__, "message": str(exc)}
    hard_fail = row["fact_1_5"] == "fail" or not row["fact_1_5_matching"]
    row["status"] = "fail" if hard_fail else main["status"]
    return row


def verify_main_theorem_sweep(instances, budget: OracleBudget = OracleBudget(), workers: int = 1,
                              with_driver: bool = False) -> list:
    """Oracle comparison rows for ``(instance_id, graph)`` pairs, sorted by id.

    Each row records the maximal profile, the matching number, the status
    against ``min(n-1, Q)`` (``pass``, ``below_threshold`` or
    ``inconclusive``) and, as a hard check, the ``min(n-k+2, Q)`` bound
    together with whether the remove-one-add-two matcher reaches it.
    ``status`` is ``fail`` exactly when that hard check fails.
    """
    jobs = [(iid, H.to_dict(), budget, with_driver) for iid, H in instances]
    if workers > 1 and len(jobs) > 1:
        with Pool(workers) as pool:
            rows = pool.map(_sweep_one, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    else:
        rows = [_sweep_one(job) for job in jobs]
    return sorted(rows, key=lambda r: r["instance_id"])


CSV_FIELDS = ("instance_id", "n", "k", "Q", "nu", "bound", "status")


def write_sweep(rows, jsonl_path, csv_path) -> None:
    with open(jsonl_path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([row[f] for f in CSV_FIELDS])
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def load_sweep_spec(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"sweep spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise InvalidInput("sweep spec must be a JSON object")
    return spec


def spec_budget(spec: dict) -> OracleBudget:
    return OracleBudget(int(spec.get("budget_nodes", 2_000_000)), float(spec.get("budget_seconds", 60.0)))
