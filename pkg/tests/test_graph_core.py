import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from cpk4.graph_core import (
    INFINITY,
    Graph,
    GraphError,
    GluedInstance,
    PartFamily,
    build_glued_graph,
    canonical,
    components,
    lovasz_partition,
    part_restricted_subgraph,
    total_domination_number,
)

from .conftest import cycle, graphs, graphs_with_family, path


def brute_total_domination(g: Graph):
    vs = list(g.vertices)
    if not vs or any(g.degree(v) == 0 for v in vs):
        return INFINITY
    for size in range(1, len(vs) + 1):
        for choice in itertools.combinations(vs, size):
            chosen = set(choice)
            if all(g.neighbors(v) & chosen for v in vs):
                return size
    return INFINITY


def to_nx(g: Graph):
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges())
    return h


def test_canonical_order_is_natural():
    assert canonical(["v10", "v2", "a", "v1"]) == ["a", "v1", "v2", "v10"]


def test_graph_rejects_loops_and_unknown_vertices():
    with pytest.raises(GraphError):
        Graph(["a"], [("a", "a")])
    with pytest.raises(GraphError):
        Graph(["a"], [("a", "b")])


def test_parallel_edges_collapse():
    g = Graph("ab", [("a", "b"), ("b", "a")])
    assert g.num_edges() == 1


class TestGluing:
    def test_empty_gluing_keeps_base(self):
        base = Graph("abc", cycle("abc"))
        assert build_glued_graph(GluedInstance(base, (), 4)) == base

    def test_path_plus_k4_is_k4(self):
        base = Graph("abcd", path("abcd"))
        g = build_glued_graph(GluedInstance(base, ("abcd",), 4))
        assert g.num_edges() == 6
        assert all(g.has_edge(u, v) for u, v in itertools.combinations("abcd", 2))

    @pytest.mark.parametrize("triangles,expected", [
        # frozen from a pairwise edge-count oracle: 15 base edges plus 15 - shared
        ([("a1", "b3", "b6"), ("a2", "b2", "b10"), ("a3", "b4", "b9"), ("a4", "b5", "b7"), ("a5", "b1", "b8")], 30),
        ([("a1", "a2", "b1"), ("a3", "a4", "b2"), ("a5", "b3", "b4"), ("b5", "b6", "b7"), ("b8", "b9", "b10")], 23),
    ])
    def test_c5_c10_edge_count(self, triangles, expected):
        c5 = [f"a{i}" for i in range(1, 6)]
        c10 = [f"b{i}" for i in range(1, 11)]
        base = Graph(c5 + c10, cycle(c5) + cycle(c10))
        g = build_glued_graph(GluedInstance(base, tuple(triangles), 3))
        assert g.num_edges() == expected
        assert set(map(frozenset, base.edges())) <= set(map(frozenset, g.edges()))

    def test_rejects_overlapping_cliques(self):
        base = Graph("abcdef", path("abcdef"))
        with pytest.raises(GraphError) as exc:
            GluedInstance(base, ("abc", "cde"), 3).validate()
        assert exc.value.rule == "clique-disjoint"

    def test_rejects_degree_three_base(self):
        star = Graph("abcd", [("a", "b"), ("a", "c"), ("a", "d")])
        with pytest.raises(GraphError):
            build_glued_graph(GluedInstance(star, (), 3))


class TestComponents:
    def test_cycle_and_path(self):
        g = Graph("abcde", cycle("abc") + path("de"))
        comps = components(g)
        assert [(c.kind, len(c.vertices)) for c in comps] == [("cycle", 3), ("path", 2)]

    def test_empty(self):
        assert components(Graph()) == []

    def test_orientation(self):
        g = Graph(["v3", "v1", "v2", "v4"], cycle(["v3", "v1", "v4", "v2"]))
        (c,) = components(g)
        # starts at v1 and heads to its smaller neighbour
        assert c.vertices == ("v1", "v3", "v2", "v4")

    @given(graphs(10))
    def test_matches_networkx(self, g):
        ours = sorted(sorted(c.vertices) for c in components(g))
        theirs = sorted(sorted(c) for c in nx.connected_components(to_nx(g)))
        assert ours == theirs


class TestPartRestricted:
    def test_triangle_part_leaves_isolates(self):
        g = Graph("abc", cycle("abc"))
        h = part_restricted_subgraph(g, PartFamily((frozenset("abc"),)), [0])
        assert len(h) == 3 and h.num_edges() == 0

    def test_cross_edge_survives(self):
        g = Graph("ab", [("a", "b")])
        h = part_restricted_subgraph(g, PartFamily((frozenset("a"), frozenset("b"))), [0, 1])
        assert h.has_edge("a", "b")

    def test_bad_index(self):
        g = Graph("ab", [("a", "b")])
        with pytest.raises(IndexError):
            part_restricted_subgraph(g, PartFamily((frozenset("a"),)), [1])

    @given(graphs_with_family(), st.data())
    def test_no_intra_part_edges(self, gf, data):
        g, fam = gf
        S = data.draw(st.sets(st.integers(0, max(len(fam) - 1, 0)))) if len(fam) else set()
        h = part_restricted_subgraph(g, fam, S)
        part_of = fam.part_of
        assert set(h.vertices) == fam.union(S)
        for u, v in h.edges():
            assert part_of[u] != part_of[v]
        for u, v in g.induced(h.vertices).edges():
            if part_of[u] != part_of[v]:
                assert h.has_edge(u, v)


class TestTotalDomination:
    @pytest.mark.parametrize("m", [2, 3, 5, 7])
    def test_complete_graph(self, m):
        vs = [f"k{i}" for i in range(m)]
        assert total_domination_number(Graph(vs, itertools.combinations(vs, 2))) == 2

    def test_single_vertex(self):
        assert total_domination_number(Graph(["a"])) == INFINITY

    def test_empty_graph(self):
        assert total_domination_number(Graph()) == INFINITY

    def test_c4(self):
        assert total_domination_number(Graph("abcd", cycle("abcd"))) == 2

    @given(graphs(9))
    @settings(max_examples=150)
    def test_matches_brute_force(self, g):
        got = total_domination_number(g)
        assert got == brute_total_domination(g)
        isolated = len(g) == 0 or any(g.degree(v) == 0 for v in g.vertices)
        assert (got == INFINITY) == isolated
        if not isolated:
            assert 2 <= got <= len(g)


class TestLovasz:
    def test_edgeless(self):
        g = Graph(["a", "b", "c"])
        lp = lovasz_partition(g, 0)
        assert lp.k == 1 and len(lp.family) == 1

    def test_degree_six_gives_four_parts(self):
        # circulant C_13(1,2,3): 6-regular
        vs = [f"u{i}" for i in range(13)]
        g = Graph(vs, [(vs[i], vs[(i + s) % 13]) for i in range(13) for s in (1, 2, 3)])
        assert g.max_degree() == 6
        lp = lovasz_partition(g, 1)
        assert lp.k == 4
        for part in lp.family:
            assert g.induced(part).max_degree() <= 1

    @given(graphs(12), st.integers(0, 3))
    @settings(max_examples=150)
    def test_parts_respect_degree(self, g, d):
        lp = lovasz_partition(g, d)
        assert lp.k == g.max_degree() // (d + 1) + 1
        assert len(lp.family) <= lp.k
        assert lp.family.union() == set(g.vertices)
        for part in lp.family:
            assert g.induced(part).max_degree() <= d

    def test_random_bounded_degree_graphs(self):
        import random

        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(1, 40)
            vs = [f"v{i}" for i in range(n)]
            deg = {v: 0 for v in vs}
            edges = []
            for u, v in itertools.combinations(vs, 2):
                if deg[u] < 6 and deg[v] < 6 and rng.random() < 0.2:
                    edges.append((u, v))
                    deg[u] += 1
                    deg[v] += 1
            g = Graph(vs, edges)
            lp = lovasz_partition(g, 1)
            for part in lp.family:
                # recount degrees by hand rather than through Graph.induced
                assert all(sum(1 for w in part if g.has_edge(v, w)) <= 1 for v in part)


def test_part_family_rejects_overlap_and_empty():
    with pytest.raises(GraphError):
        PartFamily((frozenset("ab"), frozenset("bc")))
    with pytest.raises(GraphError):
        PartFamily((frozenset(),))
