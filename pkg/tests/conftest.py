import itertools
import random

import pytest
from hypothesis import strategies as st

from cpk4.graph_core import Graph, PartFamily
from cpk4.instance_io import GeneratorSpec, gen_random
from cpk4.isr import Isr

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cycle(names):
    return [(names[i], names[(i + 1) % len(names)]) for i in range(len(names))]


def path(names):
    return list(zip(names, names[1:]))


@st.composite
def graphs(draw, max_vertices=9, p=None):
    n = draw(st.integers(0, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    pairs = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
    picks = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(vs, [e for e, keep in zip(pairs, picks) if keep])


@st.composite
def graphs_with_family(draw, max_vertices=9, max_parts=4):
    g = draw(graphs(max_vertices))
    vs = list(g.vertices)
    labels = draw(st.lists(st.integers(-1, max_parts - 1), min_size=len(vs), max_size=len(vs)))
    parts = [frozenset(v for v, lab in zip(vs, labels) if lab == k) for k in range(max_parts)]
    return g, PartFamily(tuple(p for p in parts if p))


def random_order4_spec(rng: random.Random, max_vertices=32, max_triangles=10) -> GeneratorSpec:
    """Random cycle lengths (triangles plus cycles of length >= 4), random coverage."""
    tri = rng.randint(0, min(max_triangles, max_vertices // 3))
    room = rng.randint(3 * tri, max_vertices) - 3 * tri
    cycles = []
    while room >= 4:
        length = rng.randint(4, min(room, 24))
        cycles.append((length, 1))
        room -= length
    return GeneratorSpec(rng.randrange(2**32), tuple(cycles), tri, 4, rng.random())


def random_order4(rng: random.Random, **kw):
    return gen_random(random_order4_spec(rng, **kw))


def random_combine_instance(rng: random.Random, n_max=30):
    """Random host with valid ISRs R_X, R_Y built in by construction."""
    n = rng.randint(2, n_max)
    vs = [f"v{i}" for i in range(n)]

    def family():
        labels = [rng.randint(-1, max(1, n // 3)) for _ in vs]
        parts = {}
        for v, lab in zip(vs, labels):
            if lab >= 0:
                parts.setdefault(lab, set()).add(v)
        return PartFamily(tuple(frozenset(p) for _, p in sorted(parts.items())))

    fx, fy = family(), family()
    rx = {rng.choice(sorted(p)) for p in fx.parts}
    ry = {rng.choice(sorted(p)) for p in fy.parts}
    p = rng.choice([0.05, 0.15, 0.3, 0.5])
    edges = []
    for u, w in itertools.combinations(vs, 2):
        if (u in rx and w in rx) or (u in ry and w in ry):
            continue
        if rng.random() < p:
            edges.append((u, w))
    g = Graph(vs, edges)
    return g, fx, Isr(g, fx, rx), fy, Isr(g, fy, ry)
