import itertools
import random

import pytest
from hypothesis import given, settings

from cpk4.coloring import (
    CapExceeded,
    Coloring,
    ColoringError,
    chromatic_decision,
    lift_coloring,
    verify_coloring,
)
from cpk4.graph_core import Graph

from .conftest import cycle, graphs


def brute_colourable(g, k):
    vs = list(g.vertices)
    edges = g.edges()
    for choice in itertools.product(range(k), repeat=len(vs)):
        col = dict(zip(vs, choice))
        if all(col[u] != col[v] for u, v in edges):
            return True
    return False


def k4():
    return Graph("abcd", itertools.combinations("abcd", 2))


def test_k4_needs_four():
    assert chromatic_decision(k4(), 3) is None
    col = chromatic_decision(k4(), 4)
    assert verify_coloring(k4(), col).ok


def test_odd_cycle():
    c5 = Graph("abcde", cycle("abcde"))
    assert chromatic_decision(c5, 2) is None
    assert verify_coloring(c5, chromatic_decision(c5, 3)).ok


def test_empty_graph():
    assert chromatic_decision(Graph(), 3).assignment == {}


def test_first_vertex_gets_colour_zero():
    g = Graph(["a", "b"], [("a", "b")])
    assert chromatic_decision(g, 3).assignment == {"a": 0, "b": 1}


def test_cap():
    vs = [f"v{i}" for i in range(41)]
    with pytest.raises(CapExceeded):
        chromatic_decision(Graph(vs), 3)
    assert chromatic_decision(Graph(vs), 3, cap=100) is not None


def test_bad_k():
    with pytest.raises(ValueError):
        chromatic_decision(k4(), 0)


@given(graphs(8))
@settings(max_examples=200)
def test_matches_enumeration(g):
    for k in (2, 3):
        col = chromatic_decision(g, k)
        assert (col is not None) == brute_colourable(g, k)
        if col is not None:
            assert verify_coloring(g, col).ok


def test_monotone_in_k():
    rng = random.Random(6)
    for _ in range(100):
        n = rng.randint(1, 12)
        vs = [f"v{i}" for i in range(n)]
        g = Graph(vs, [e for e in itertools.combinations(vs, 2) if rng.random() < 0.45])
        answers = [chromatic_decision(g, k) is not None for k in range(1, 6)]
        assert answers == sorted(answers)
        if n <= 9:
            assert answers[2] == brute_colourable(g, 3)


class TestVerify:
    def test_missing_vertex(self):
        res = verify_coloring(k4(), Coloring({"a": 0, "b": 1, "c": 2}, 4))
        assert not res.ok and res.witness == ("d",)

    def test_out_of_palette(self):
        res = verify_coloring(k4(), Coloring({"a": 0, "b": 1, "c": 2, "d": 4}, 4))
        assert not res.ok and res.reason == "colour outside the palette"

    def test_monochromatic(self):
        res = verify_coloring(k4(), Coloring({"a": 0, "b": 0, "c": 1, "d": 2}, 4))
        assert res.witness == ("a", "b")


class TestLift:
    def test_k4(self):
        g = k4()
        c3 = chromatic_decision(g.remove_vertices({"d"}), 3)
        lifted = lift_coloring(g, {"d"}, c3)
        assert lifted.assignment["d"] == 3 and verify_coloring(g, lifted).ok

    def test_rejects_dependent_set(self):
        g = k4()
        c3 = chromatic_decision(g.remove_vertices({"c", "d"}), 3)
        with pytest.raises(ColoringError):
            lift_coloring(g, {"c", "d"}, c3)

    def test_rejects_improper_colouring(self):
        g = k4()
        with pytest.raises(ColoringError):
            lift_coloring(g, {"d"}, Coloring({"a": 0, "b": 0, "c": 1}, 3))
