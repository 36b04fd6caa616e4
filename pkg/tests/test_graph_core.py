from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapping_torus.graph_core import (
    CyclicPath,
    Graph,
    GraphError,
    SubgraphHandle,
    _least_rotation,
    components,
    core_subgraph,
    is_circle,
    loop_component_word,
    neg_euler,
    subgraph_from_edges,
    whole,
)


def loop_with_tail(tail: int) -> Graph:
    # vertex 0 carries a self-loop, then a path 0-1-...-tail
    edges = [(0, 0)] + [(i, i + 1) for i in range(tail)]
    return Graph(tail + 1, tuple(edges))


def theta() -> Graph:
    return Graph(2, ((0, 1), (0, 1), (0, 1)))


def rose(n: int) -> Graph:
    return Graph(1, tuple((0, 0) for _ in range(n)))


def circle(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def disjoint(*gs: Graph) -> Graph:
    edges, offset = [], 0
    for g in gs:
        edges += [(a + offset, b + offset) for a, b in g.edges]
        offset += g.n_vertices
    return Graph(offset, tuple(edges))


graphs = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=9).map(
        lambda es: Graph(n, tuple(es))
    )
)


class TestGraph:
    def test_darts_and_reversal(self):
        g = theta()
        assert g.n_darts == 6
        for d in g.darts():
            assert d ^ 1 != d
            assert g.terminus(d) == g.origin(d ^ 1)

    def test_self_loop_darts_share_base(self):
        g = rose(1)
        assert g.origin(0) == g.origin(1) == 0
        assert g.valence(0) == 2

    def test_bad_endpoint_rejected(self):
        with pytest.raises(GraphError):
            Graph(1, ((0, 1),))

    def test_empty_graph_is_legal(self):
        g = Graph(0, ())
        assert components(g) == []
        assert core_subgraph(g).is_empty()
        assert neg_euler(g) == 0

    def test_dart_names(self):
        g = Graph(1, ((0, 0),), ("v",), ("a",))
        assert g.dart_name(0) == "a" and g.dart_name(1) == "a'"
        assert g.dart_by_name("a'") == 1


class TestCore:
    def test_loop_with_tail(self):
        core = core_subgraph(loop_with_tail(3))
        assert core.edges == frozenset({0})
        assert core.vertices == frozenset({0})

    def test_tree_has_empty_core(self):
        tree = Graph(5, ((0, 1), (1, 2), (1, 3), (3, 4)))
        assert core_subgraph(tree).is_empty()

    def test_theta_is_its_own_core(self):
        g = theta()
        assert core_subgraph(g) == whole(g)

    def test_isolated_vertex_pruned(self):
        g = Graph(2, ((0, 0),))
        assert core_subgraph(g).vertices == frozenset({0})

    @given(graphs)
    def test_idempotent(self, g):
        once = core_subgraph(g)
        assert core_subgraph(once) == once

    @given(graphs)
    def test_no_leaves(self, g):
        core = core_subgraph(g)
        assert all(core.valence(v) >= 2 for v in core.vertices)

    @given(graphs)
    def test_neg_euler_unchanged_by_core(self, g):
        assert neg_euler(core_subgraph(g)) == neg_euler(g)


class TestComponents:
    def test_loop_and_theta(self):
        assert len(components(disjoint(circle(1), theta()))) == 2

    def test_rose_connected(self):
        assert len(components(rose(3))) == 1

    def test_order_by_least_vertex(self):
        comps = components(disjoint(theta(), circle(2), rose(1)))
        assert [min(c.vertices) for c in comps] == [0, 2, 4]

    @given(graphs)
    def test_partition(self, g):
        comps = components(g)
        darts = [d for c in comps for d in c.darts]
        assert sorted(darts) == list(g.darts())
        for c in comps:
            assert all(d ^ 1 in c.darts for d in c.darts)
            assert all(g.origin(d) in c.vertices for d in c.darts)


class TestNegEuler:
    def test_two_petal_rose(self):
        assert neg_euler(rose(2)) == 1

    def test_three_circles(self):
        assert neg_euler(disjoint(circle(1), circle(2), circle(3))) == 0

    def test_rose_and_two_loops(self):
        assert neg_euler(disjoint(rose(2), circle(1), circle(1))) == 1

    def test_sums_over_components(self):
        assert neg_euler(disjoint(rose(3), theta())) == 3


class TestLoopWord:
    def test_self_loop(self):
        g = rose(1)
        assert len(loop_component_word(whole(g))) == 1

    def test_four_cycle(self):
        c = loop_component_word(whole(circle(4)))
        assert len(c) == 4
        assert c.darts[0] == min(c.darts)

    def test_theta_rejected(self):
        with pytest.raises(GraphError):
            loop_component_word(whole(theta()))

    def test_is_circle(self):
        assert is_circle(whole(circle(3)))
        assert not is_circle(whole(theta()))


class TestCyclicPath:
    @given(st.lists(st.integers(0, 3), min_size=1, max_size=8))
    def test_least_rotation_matches_brute_force(self, seq):
        brute = min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))
        assert _least_rotation(seq) == brute

    def test_rotation_invariance(self):
        assert CyclicPath([2, 4, 0]) == CyclicPath([0, 2, 4])

    def test_tightness_includes_seam(self):
        assert not CyclicPath([0, 2, 3, 1]).is_tight()
        assert CyclicPath([0, 2]).is_tight()

    def test_power(self):
        assert CyclicPath([0, 2]).power(3).darts == (0, 2) * 3
