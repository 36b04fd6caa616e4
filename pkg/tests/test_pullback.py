import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapping_torus import fixtures
from mapping_torus.graph_core import CyclicPath, Graph, GraphError, components, core_subgraph, is_circle, neg_euler
from mapping_torus.graph_map import apply_point, identity_map, iterate, map_cyclic
from mapping_torus.pullback import (
    HatChain,
    chain_embedding_holds,
    classify_components,
    diagonal_matches,
    hat_gamma,
    hat_gamma_chain,
    loop_pairs,
    minimal_root,
    pullback,
    subloop_count,
    swap_is_automorphism,
)
from mapping_torus.words import letter_to_dart, rose, rose_map

A, B = letter_to_dart(1), letter_to_dart(2)
doubling = rose_map(fixtures.psi(2))
sapir = rose_map(fixtures.SAPIR)
ident = identity_map(rose(2))


def real(p) -> Fraction:
    return p.offset if p.kind == 1 else Fraction(0)


def differences(p, comp) -> set[Fraction]:
    return {(real(y) - real(x)) % 1 for x, y in (p.vertex_labels[v] for v in comp.vertices)}


def random_map(seed: int):
    return rose_map(fixtures.random_rose_immersion(random.Random(seed), random.Random(seed).randint(1, 3), 3))


class TestPullback:
    def test_depth_zero_is_diagonal(self):
        p = pullback(sapir, 0)
        assert all(x == y for x, y in p.vertex_labels)
        assert p.graph.n_edges == sapir.domain.n_edges

    def test_doubling_depth_one(self):
        p = pullback(doubling, 1)
        comps = components(p.graph)
        assert len(comps) == 2
        assert sorted(min(differences(p, c)) for c in comps) == [0, Fraction(1, 2)]

    def test_sapir_depth_one(self):
        p = pullback(sapir, 1)
        core = core_subgraph(p.graph)
        circles = [c for c in components(core) if is_circle(c)]
        assert neg_euler(p.graph) == 1
        # a copy of the rose plus two loops
        assert len(components(core)) == 3
        assert len(circles) == 2

    def test_identity_is_diagonal(self):
        for i in (1, 2, 3):
            p = pullback(ident, i)
            assert all(x == y for x, y in p.vertex_labels)

    @pytest.mark.parametrize("name", ["sapir", "bs12", "psi:3", "fixed-loop", "forest"])
    def test_labels_have_equal_images(self, name):
        f = fixtures.as_map(fixtures.example(name))
        for i in (1, 2):
            p = pullback(f, i)
            for x, y in p.vertex_labels:
                assert apply_point(f, x, i) == apply_point(f, y, i)

    @pytest.mark.parametrize("name", ["sapir", "bs12", "forest"])
    def test_swap_and_diagonal(self, name):
        f = fixtures.as_map(fixtures.example(name))
        for i in (0, 1, 2):
            p = pullback(f, i)
            assert swap_is_automorphism(p)
            assert diagonal_matches(p)


class TestClassify:
    def test_doubling_depth_two(self):
        p = pullback(doubling, 2)
        old, new = classify_components(p)
        assert sorted(min(differences(p, c)) for c in old) == [0, Fraction(1, 2)]
        assert sorted(min(differences(p, c)) for c in new) == [Fraction(1, 4), Fraction(3, 4)]

    def test_sapir_depth_two(self):
        p = pullback(sapir, 2)
        _, new = classify_components(p)
        assert all(core_subgraph(c).is_empty() for c in new)

    def test_identity_all_old(self):
        old, new = classify_components(pullback(ident, 1))
        assert new == [] and len(old) == 1

    def test_depth_mismatch(self):
        with pytest.raises(GraphError):
            classify_components(pullback(sapir, 2), pullback(sapir, 0))
        with pytest.raises(GraphError):
            classify_components(pullback(sapir, 0))


class TestHatGamma:
    def test_doubling_counts(self):
        for i in range(1, 6):
            assert len(hat_gamma(doubling, i)) == 2 ** (i - 1)
            assert len(hat_gamma_chain(doubling, i)) == 2 ** (i - 1)

    def test_sapir(self):
        assert len(hat_gamma(sapir, 1)) == 2
        assert hat_gamma(sapir, 2) == []
        assert hat_gamma(sapir, 3) == []

    def test_identity_empty(self):
        for i in (1, 2, 3):
            assert hat_gamma(ident, i) == []

    def test_depth_must_be_positive(self):
        with pytest.raises(ValueError):
            hat_gamma(sapir, 0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_routes_agree(self, seed):
        f = random_map(seed)
        chain = HatChain(f)
        for i in (1, 2):
            full = {h.edge_key_set() for h in hat_gamma(f, i)}
            inc = {h.edge_key_set() for h in chain.components(i)}
            assert full == inc

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_chain_property(self, seed):
        f = random_map(seed)
        assert chain_embedding_holds(pullback(f, 1), pullback(f, 2))


class TestLoopPairs:
    def test_doubling(self):
        pairs = loop_pairs(doubling, 1)
        assert len(pairs) == 1
        assert pairs[0].c_minus == pairs[0].c_plus == CyclicPath([A])

    def test_sapir(self):
        pairs = loop_pairs(sapir, 1)
        assert {(p.c_minus, p.c_plus) for p in pairs} == {
            (CyclicPath([A]), CyclicPath([B])),
            (CyclicPath([B]), CyclicPath([A])),
        }

    def test_empty_depth(self):
        assert loop_pairs(sapir, 2) == []

    @pytest.mark.parametrize("name,depth", [("sapir", 1), ("bs12", 3), ("psi:3", 2)])
    def test_projections_have_equal_images(self, name, depth):
        f = fixtures.as_map(fixtures.example(name))
        fi = iterate(f, depth)
        for pair in loop_pairs(f, depth):
            assert map_cyclic(fi, pair.c_minus) == map_cyclic(fi, pair.c_plus)


class TestRootsAndSubloops:
    def test_power_of_ab(self):
        assert minimal_root(CyclicPath([A, B] * 3)) == (CyclicPath([A, B]), 3)

    def test_primitive(self):
        c = CyclicPath([A, B, B])
        assert minimal_root(c) == (c, 1)

    def test_subdivided_circle_twice(self):
        assert minimal_root(CyclicPath([0, 2, 0, 2])) == (CyclicPath([0, 2]), 2)

    def test_self_loop(self):
        assert subloop_count(rose(1), CyclicPath([A])) == 1

    @pytest.mark.parametrize("length", [1, 2, 3, 5])
    def test_rose_loop(self, length):
        c = CyclicPath([A] * (length - 1) + [B])
        assert subloop_count(rose(2), c) == length**2

    @pytest.mark.parametrize("length", [2, 3, 6])
    def test_embedded_circle(self, length):
        g = Graph(length, tuple((i, (i + 1) % length) for i in range(length)))
        c = CyclicPath([2 * i for i in range(length)])
        assert subloop_count(g, c) == length

    @given(st.lists(st.sampled_from([A, B, A ^ 1, B ^ 1]), min_size=1, max_size=6))
    def test_subloop_brute_force(self, darts):
        # on a rose every subpath is closed, so the count is l(c)^2
        assert subloop_count(rose(2), CyclicPath(darts)) == len(darts) ** 2
