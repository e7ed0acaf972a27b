import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import brute
from hypermatch.constructions import (
    SplitMix64,
    all_instances,
    complete,
    divisibility_barrier,
    divisibility_size_vectors,
    fact_1_5_matching,
    random_instance,
    space_barrier,
)
from hypermatch.core import KPartiteHypergraph, greedy_matching, validate_matching
from hypermatch.errors import HypothesisUnmet, InvalidInput
from hypermatch.oracles import max_matching_exact


class TestSplitMix:
    def test_reference_stream(self):
        # first outputs for seed 0, as published with the reference generator
        rng = SplitMix64(0)
        assert [rng.next_u64() for _ in range(3)] == [
            0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_bernoulli_extremes(self):
        rng = SplitMix64(7)
        assert not any(rng.bernoulli(Fraction(0)) for _ in range(100))
        assert all(rng.bernoulli(Fraction(1)) for _ in range(100))


class TestDivisibility:
    def test_parity_of_every_edge(self):
        c = divisibility_barrier(3, 4, (1, 2, 2))
        A = c.union_a()
        for e in c.graph.edges:
            assert sum(1 for v in enumerate(e) if v in A) % 2 == 0
        non_edges = set(itertools.product(range(4), repeat=3)) - set(c.graph.edges)
        assert all(sum(1 for v in enumerate(e) if v in A) % 2 == 1 for e in non_edges)

    def test_codegrees(self):
        H = divisibility_barrier(3, 4, (1, 2, 2)).graph
        # a completion into class i must fix the parity, so it ranges over A_i or its complement
        assert H.codegree_profile() == (1, 2, 2)
        assert H.codegree_profile() == tuple(brute.codegree(H.edges, H.class_sizes, i) for i in range(3))
        assert min(H.codegree_profile()) == 4 // 2 - 1

    def test_matching_number(self):
        H = divisibility_barrier(3, 4, (1, 2, 2)).graph
        assert max_matching_exact(H).value == 3 == brute.matching_number(H.edges)

    def test_default_sizes(self):
        assert divisibility_barrier(3, 4).params["sizes"] == [1, 2, 2]
        assert divisibility_barrier(3, 4).graph.num_edges() == 32

    def test_size_vectors(self):
        vs = divisibility_size_vectors(3, 4)
        assert all(sum(v) % 2 == 1 and all(1 <= x <= 3 for x in v) for v in vs)
        assert vs == sorted(vs)
        assert len(vs) == 14

    def test_rejects_even_sum(self):
        with pytest.raises(InvalidInput):
            divisibility_barrier(3, 4, (2, 2, 2))


class TestSpace:
    def test_matching_number(self):
        H = space_barrier(3, 4, (1, 1, 1)).graph
        assert max_matching_exact(H).value == 3 == brute.matching_number(H.edges)

    def test_zero_profile_is_empty(self):
        assert space_barrier(3, 3, (0, 0, 0)).graph.num_edges() == 0

    def test_full_first_class_is_complete(self):
        assert space_barrier(3, 3, (3, 0, 0)).graph == complete(3, 3)

    def test_metadata(self):
        c = space_barrier(3, 4, (2, 1, 0))
        assert c.metadata() == {"construction": "space", "parameters": {"k": 3, "n": 4, "a": [2, 1, 0]},
                                "A_sets": [[0, 1], [0], []]}

    def test_rejects_oversized(self):
        with pytest.raises(InvalidInput):
            space_barrier(3, 2, (3, 0, 0))


class TestRandom:
    def test_deterministic(self):
        a = random_instance(3, 4, (1, 0, 0), Fraction(1, 3), 11).graph
        b = random_instance(3, 4, (1, 0, 0), Fraction(1, 3), 11).graph
        assert a == b

    def test_contains_barrier(self):
        H = random_instance(3, 4, (1, 1, 0), Fraction(1, 5), 3).graph
        assert set(space_barrier(3, 4, (1, 1, 0)).graph.edges) <= set(H.edges)
        assert all(x >= y for x, y in zip(H.codegree_profile(), (1, 1, 0)))

    def test_float_density_goes_through_decimal(self):
        a = random_instance(3, 3, (0, 0, 0), 0.5, 1).graph
        b = random_instance(3, 3, (0, 0, 0), Fraction(1, 2), 1).graph
        assert a == b

    def test_density_range(self):
        with pytest.raises(InvalidInput):
            random_instance(3, 3, (0, 0, 0), Fraction(3, 2), 1)


def test_all_instances_count_and_order():
    seen = list(all_instances(3, 2))
    assert len(seen) == 256
    assert seen[0][1].num_edges() == 0
    assert seen[-1][1] == complete(3, 2)
    assert seen[1][1].edges == ((0, 0, 0),)


class TestFact15:
    def test_space_barrier(self):
        H = space_barrier(3, 4, (1, 1, 1)).graph
        M = fact_1_5_matching(H, (1, 1, 1))
        assert len(M) == 3 and validate_matching(H, M)[0]

    def test_complete_returns_exact_target(self):
        M = fact_1_5_matching(complete(3, 4), (4, 0, 0))
        assert len(M) == 3

    def test_zero_profile(self):
        assert fact_1_5_matching(complete(3, 3), (0, 0, 0)) == []

    def test_profile_must_hold(self):
        with pytest.raises(HypothesisUnmet):
            fact_1_5_matching(space_barrier(3, 3, (1, 0, 0)).graph, (2, 0, 0))

    def test_needs_moves(self):
        # greedy spends all three barrier vertices on (0,0,0)
        H = space_barrier(3, 4, (1, 1, 1)).graph
        assert len(greedy_matching(H)) == 1
        M = fact_1_5_matching(H, (1, 1, 1))
        assert len(M) == 3 and validate_matching(H, M)[0]

    @given(st.integers(0, 255))
    def test_every_n2_instance(self, mask):
        H = _instance(mask)
        a = H.codegree_profile()
        M = fact_1_5_matching(H, a)
        assert validate_matching(H, M)[0]
        assert len(M) == max(0, min(2 - 3 + 2, sum(a)))


def _instance(mask):
    tuples = list(itertools.product(range(2), repeat=3))
    return KPartiteHypergraph([2] * 3, [t for j, t in enumerate(tuples) if mask >> j & 1])
