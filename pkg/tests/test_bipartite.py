import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import brute
from hypermatch.bipartite import (
    BipartiteGraph,
    Core,
    RobustWitness,
    core_from_violation,
    dichotomy_24,
    hall_violator,
    max_bip_matching,
)
from hypermatch.errors import HypothesisUnmet, InvalidInput


@st.composite
def bipartite_graphs(draw, max_side=4):
    left = draw(st.integers(0, max_side))
    right = draw(st.integers(0, max_side))
    pairs = list(itertools.product(range(left), range(right)))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return BipartiteGraph.from_edges(left, right, [p for p, b in zip(pairs, mask) if b])


def is_matching(G, M):
    return (len({u for u, _ in M}) == len(M) == len({v for _, v in M})
            and all(v in G.adjacency[u] for u, v in M))


class TestMaxMatching:
    def test_complete(self):
        G = BipartiteGraph(3, 3, ((0, 1, 2),) * 3)
        assert len(max_bip_matching(G)) == 3

    def test_star(self):
        assert len(max_bip_matching(BipartiteGraph(1, 5, ((0, 1, 2, 3, 4),)))) == 1

    def test_six_cycle(self):
        G = BipartiteGraph(3, 3, ((0, 1), (1, 2), (2, 0)))
        assert len(max_bip_matching(G)) == 3 == brute.bipartite_matching_number(3, 3, G.edges())

    @given(bipartite_graphs())
    def test_agrees_with_enumeration(self, G):
        M = max_bip_matching(G)
        assert is_matching(G, M)
        assert len(M) == brute.bipartite_matching_number(G.left_size, G.right_size, G.edges())

    def test_rejects_bad_rows(self):
        with pytest.raises(InvalidInput):
            BipartiteGraph(1, 2, ((0, 0),))
        with pytest.raises(InvalidInput):
            BipartiteGraph(1, 2, ((2,),))


class TestHallViolator:
    def test_perfect(self):
        assert hall_violator(BipartiteGraph(2, 2, ((0,), (1,)))) is None

    def test_shared_single_neighbour(self):
        assert hall_violator(BipartiteGraph(2, 3, ((1,), (1,)))) == {0, 1}

    def test_isolated(self):
        assert hall_violator(BipartiteGraph(2, 2, ((0, 1), ()))) == {1}

    @given(bipartite_graphs())
    def test_violation_is_real(self, G):
        S = hall_violator(G)
        if S is None:
            assert len(max_bip_matching(G)) == G.left_size
        else:
            assert len(G.neighbours(S)) < len(S)


def shared_neighbourhood(left, common):
    return BipartiteGraph(left, 3 * common, (tuple(range(common)),) * left)


class TestDichotomy:
    def test_complete_is_robust(self):
        q = 50
        G = BipartiteGraph(51, 150, (tuple(range(150)),) * 51)
        out = dichotomy_24(G, q, Fraction(1, 50))
        assert isinstance(out, RobustWitness)
        assert [Y for Y, _ in out.tested] == [(), (0,)]

    def test_mu_zero_tests_only_empty_set(self):
        G = BipartiteGraph(4, 4, ((0, 1, 2, 3),) * 4)
        out = dichotomy_24(G, 4, 0)
        assert isinstance(out, RobustWitness) and len(out.tested) == 1

    def test_shared_neighbourhood_after_one_deletion(self):
        # 49 colours all see the same 49 vertices: deleting one breaks saturation
        G = shared_neighbourhood(49, 49)
        out = dichotomy_24(G, 50, Fraction(1, 50))
        assert isinstance(out, Core)
        assert len(out.Y) == 1 and len(out.B_prime) == 25
        assert set(out.B_prime) <= G.neighbours(out.X)
        assert len(out.X) == 49

    def test_shared_neighbourhood_already_broken(self):
        G = shared_neighbourhood(50, 49)
        out = dichotomy_24(G, 50, Fraction(1, 50))
        assert isinstance(out, Core) and out.Y == ()
        assert hall_violator(G) == frozenset(out.X)

    def test_core_subsets_match_perfectly(self):
        G = shared_neighbourhood(49, 49)
        out = dichotomy_24(G, 50, Fraction(1, 50))
        for A in itertools.islice(itertools.combinations(out.X, 25), 20):
            assert len(max_bip_matching(G.restrict(A, out.B_prime))) == 25

    def test_hypotheses(self):
        G = shared_neighbourhood(49, 40)
        with pytest.raises(HypothesisUnmet):
            dichotomy_24(G, 50, Fraction(1, 50))
        with pytest.raises(HypothesisUnmet):
            dichotomy_24(shared_neighbourhood(52, 49), 50, Fraction(1, 50))
        with pytest.raises(InvalidInput):
            dichotomy_24(shared_neighbourhood(49, 49), 50, Fraction(1, 10))

    def test_core_needs_violation(self):
        with pytest.raises(InvalidInput):
            core_from_violation(BipartiteGraph(1, 1, ((0,),)), (), 1, 0)

    @given(st.integers(4, 12), st.data())
    def test_outcome_is_consistent(self, q, data):
        right = q + 3
        left = data.draw(st.integers(1, q))
        rows = []
        for _ in range(left):
            size = data.draw(st.integers(q, right))
            rows.append(tuple(sorted(data.draw(st.permutations(range(right)))[:size])))
        G = BipartiteGraph(left, right, tuple(rows))
        out = dichotomy_24(G, q, 0)
        assert isinstance(out, RobustWitness)
        for Y, M in out.tested:
            assert len(M) == left and is_matching(G.without_right(Y), M)
