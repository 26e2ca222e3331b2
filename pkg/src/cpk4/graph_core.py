"""Graphs, glued instances, part families and the basic operations on them.

Vertices are opaque strings.  Every graph keeps its vertices in a canonical
order (natural sort, so ``v2`` comes before ``v10``) and every routine in the
package iterates in that order, which is what makes traces reproducible.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

INFINITY = math.inf

_DIGITS = re.compile(r"(\d+)")


class GraphError(ValueError):
    """Raised when a graph, instance or family violates one of its invariants."""

    def __init__(self, message: str, rule: str | None = None):
        super().__init__(message)
        self.rule = rule


def vertex_key(v: str):
    pieces = _DIGITS.split(v)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(pieces)) + (v,)


def canonical(vertices: Iterable[str]) -> list[str]:
    return sorted(vertices, key=vertex_key)


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if vertex_key(u) <= vertex_key(v) else (v, u)


class Graph:
    """Simple undirected graph.  Treat instances as immutable."""

    __slots__ = ("vertices", "_adj", "_index", "_masks")

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[tuple[str, str]] = ()):
        verts = canonical(set(vertices))
        adj: dict[str, set[str]] = {v: set() for v in verts}
        for u, v in edges:
            if u == v:
                raise GraphError(f"loop at {u!r}", rule="simple")
            if u not in adj or v not in adj:
                raise GraphError(f"edge {u!r}-{v!r} uses an undeclared vertex", rule="vertex")
            adj[u].add(v)
            adj[v].add(u)
        self.vertices: tuple[str, ...] = tuple(verts)
        self._adj = {v: frozenset(n) for v, n in adj.items()}
        self._index = None
        self._masks = None

    @classmethod
    def from_adjacency(cls, adj: dict[str, Iterable[str]]) -> "Graph":
        return cls(adj, ((u, v) for u, ns in adj.items() for v in ns))

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self._adj

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self):
        return hash(frozenset(self.edges())) ^ hash(self.vertices)

    def __repr__(self):
        return f"Graph(n={len(self)}, m={self.num_edges()})"

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(n) for n in self._adj.values()), default=0)

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[str, str]]:
        """Edges as canonical ``(u, v)`` pairs, sorted."""
        out = []
        for u in self.vertices:
            ku = vertex_key(u)
            out.extend((u, v) for v in self._adj[u] if ku < vertex_key(v))
        out.sort(key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))
        return out

    def num_edges(self) -> int:
        return sum(len(n) for n in self._adj.values()) // 2

    def induced(self, keep: Iterable[str]) -> "Graph":
        keep = set(keep) & self._adj.keys()
        return Graph(keep, ((u, v) for u in keep for v in self._adj[u] if v in keep))

    def remove_vertices(self, drop: Iterable[str]) -> "Graph":
        drop = set(drop)
        return self.induced(v for v in self.vertices if v not in drop)

    def remove_edges(self, drop: Iterable[tuple[str, str]]) -> "Graph":
        drop = {frozenset(e) for e in drop}
        return Graph(self.vertices, (e for e in self.edges() if frozenset(e) not in drop))

    def is_independent(self, vs: Iterable[str]) -> bool:
        vs = set(vs)
        return all(not (self._adj[v] & vs) for v in vs)

    # bitmask view, used by the exhaustive searches
    @property
    def index(self) -> dict[str, int]:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.vertices)}
        return self._index

    @property
    def masks(self) -> list[int]:
        if self._masks is None:
            idx = self.index
            self._masks = [sum(1 << idx[u] for u in self._adj[v]) for v in self.vertices]
        return self._masks

    def to_mask(self, vs: Iterable[str]) -> int:
        idx = self.index
        m = 0
        for v in vs:
            m |= 1 << idx[v]
        return m

    def from_mask(self, mask: int) -> list[str]:
        return [self.vertices[i] for i in iter_bits(mask)]


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class PartFamily:
    """Ordered family of pairwise-disjoint, nonempty vertex sets."""

    parts: tuple[frozenset, ...]
    labels: tuple[str | None, ...] = ()

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        labels = tuple(self.labels) or (None,) * len(parts)
        if len(labels) != len(parts):
            raise GraphError("one label per part required", rule="labels")
        object.__setattr__(self, "labels", labels)
        seen: set = set()
        for i, p in enumerate(parts):
            if not p:
                raise GraphError(f"part {i} is empty", rule="nonempty")
            if seen & p:
                raise GraphError(f"part {i} overlaps an earlier part", rule="disjoint")
            seen |= p

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def part_of(self) -> dict[str, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def union(self, S: Iterable[int] | None = None) -> set[str]:
        idx = range(len(self.parts)) if S is None else S
        out: set[str] = set()
        for i in idx:
            out |= self.parts[i]
        return out

    def check_over(self, g: Graph):
        for i, p in enumerate(self.parts):
            missing = [v for v in p if v not in g]
            if missing:
                raise GraphError(f"part {i} has vertices outside the host: {canonical(missing)}", rule="host")


@dataclass(frozen=True)
class GluedInstance:
    """A base graph H with vertex-disjoint cliques glued onto it."""

    base: Graph
    cliques: tuple[tuple[str, ...], ...] = ()
    order: int = 4

    def __post_init__(self):
        object.__setattr__(self, "cliques", tuple(tuple(canonical(c)) for c in self.cliques))

    def validate(self):
        if self.order not in (3, 4):
            raise GraphError(f"clique order must be 3 or 4, got {self.order}", rule="order")
        if self.base.max_degree() > 2:
            raise GraphError("base graph has a vertex of degree > 2", rule="max-degree")
        for comp in components(self.base):
            if comp.kind == "other":
                raise GraphError("base component is neither a path nor a cycle", rule="components")
        seen: set[str] = set()
        for j, c in enumerate(self.cliques):
            if len(set(c)) != self.order:
                raise GraphError(f"clique {j} has {len(set(c))} vertices, expected {self.order}", rule="clique-size")
            for v in c:
                if v not in self.base:
                    raise GraphError(f"clique {j} uses undeclared vertex {v!r}", rule="clique-undeclared")
                if v in seen:
                    raise GraphError(f"vertex {v!r} lies in two cliques", rule="clique-disjoint")
                seen.add(v)
        return self

    @property
    def clique_family(self) -> PartFamily:
        return PartFamily(tuple(frozenset(c) for c in self.cliques), ("clique",) * len(self.cliques))

    @property
    def graph(self) -> Graph:
        return build_glued_graph(self)


def build_glued_graph(inst: GluedInstance) -> Graph:
    inst.validate()
    extra = (pair for c in inst.cliques for pair in itertools.combinations(c, 2))
    return Graph(inst.base.vertices, itertools.chain(inst.base.edges(), extra))


class Component(NamedTuple):
    vertices: tuple[str, ...]
    kind: str  # "isolated", "path", "cycle" or "other"

    @property
    def length(self) -> int:
        """Number of edges for paths and cycles."""
        if self.kind == "cycle":
            return len(self.vertices)
        if self.kind in ("path", "isolated"):
            return len(self.vertices) - 1
        raise ValueError("length is only defined for paths and cycles")


def _walk(g: Graph, start: str, first: str | None) -> list[str]:
    order = [start]
    prev, cur = start, first
    while cur is not None and cur != start:
        order.append(cur)
        nxt = [w for w in g.neighbors(cur) if w != prev]
        prev, cur = cur, (nxt[0] if nxt else None)
    return order


def components(g: Graph) -> list[Component]:
    """Connected components, listed by smallest vertex.

    Paths are traversed from their smaller endpoint, cycles from their smallest
    vertex towards its smaller neighbour; other components are listed in
    canonical order.
    """
    seen: set[str] = set()
    out = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        degs = [g.degree(u) for u in comp]
        n = len(comp)
        m = sum(degs) // 2
        if n == 1:
            out.append(Component((v,), "isolated"))
        elif max(degs) <= 2 and m == n - 1:
            ends = canonical(u for u in comp if g.degree(u) == 1)
            out.append(Component(tuple(_walk(g, ends[0], next(iter(g.neighbors(ends[0]))))), "path"))
        elif max(degs) == 2 and min(degs) == 2:
            start = canonical(comp)[0]
            first = canonical(g.neighbors(start))[0]
            out.append(Component(tuple(_walk(g, start, first)), "cycle"))
        else:
            out.append(Component(tuple(canonical(comp)), "other"))
    return out


def component_masks(masks: Sequence[int], universe: int) -> list[int]:
    """Connected components of the subgraph induced by ``universe`` (bitmasks)."""
    out = []
    rest = universe
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for i in iter_bits(frontier):
                nxt |= masks[i]
            nxt &= universe & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        rest &= ~comp
    return out


def restricted_masks(g: Graph, fam: PartFamily, S: Iterable[int]) -> tuple[list[int], int]:
    """Bitmask adjacency of the part-restricted subgraph, in ``g``'s indexing."""
    masks = g.masks
    part_mask = [g.to_mask(p) for p in fam.parts]
    universe = 0
    for i in S:
        universe |= part_mask[i]
    out = [0] * len(masks)
    for i in S:
        pm = part_mask[i]
        for b in iter_bits(pm):
            out[b] = masks[b] & universe & ~pm
    return out, universe


def part_restricted_subgraph(g: Graph, fam: PartFamily, S: Iterable[int]) -> Graph:
    """Induced subgraph on the parts indexed by ``S`` with all intra-part edges removed."""
    S = sorted(set(S))
    for i in S:
        if not 0 <= i < len(fam):
            raise IndexError(f"part index {i} out of range for a family of {len(fam)}")
    keep = fam.union(S)
    part_of = fam.part_of
    return Graph(keep, ((u, v) for u, v in g.induced(keep).edges() if part_of[u] != part_of[v]))


def _component_total_domination(masks: Sequence[int], comp: int) -> float:
    bits = list(iter_bits(comp))
    if len(bits) == 1:
        return INFINITY
    nbr = [masks[b] & comp for b in bits]
    for size in range(2, len(bits) + 1):
        for choice in itertools.combinations(range(len(bits)), size):
            covered = 0
            for c in choice:
                covered |= nbr[c]
            if covered == comp:
                return size
    return INFINITY  # unreachable for connected components


def total_domination_masks(masks: Sequence[int], universe: int) -> float:
    """Total domination number of the subgraph induced by ``universe``."""
    if not universe:
        return INFINITY
    total = 0
    for comp in component_masks(masks, universe):
        t = _component_total_domination(masks, comp)
        if t == INFINITY:
            return INFINITY
        total += t
    return total


def total_domination_number(g: Graph) -> float:
    """Smallest total dominating set size; ``INFINITY`` with isolated vertices or no vertices."""
    return total_domination_masks(g.masks, (1 << len(g)) - 1)


class LovaszPartition(NamedTuple):
    family: PartFamily
    k: int


def lovasz_partition(g: Graph, d: int) -> LovaszPartition:
    """Split V(g) into k = floor(D/(d+1)) + 1 classes, each inducing max degree <= d."""
    if d < 0:
        raise ValueError("d must be non-negative")
    k = g.max_degree() // (d + 1) + 1
    where = {v: i % k for i, v in enumerate(g.vertices)}
    moved = True
    while moved:
        moved = False
        for v in g.vertices:
            counts = [0] * k
            for w in g.neighbors(v):
                counts[where[w]] += 1
            if counts[where[v]] > d:
                # deg(v) <= D < (d+1)k, so some class has at most d neighbours
                where[v] = min(range(k), key=lambda i: (counts[i], i))
                moved = True
    parts = [[v for v in g.vertices if where[v] == i] for i in range(k)]
    fam = PartFamily(tuple(frozenset(p) for p in parts if p))
    return LovaszPartition(fam, k)


def fresh_ids(taken: Iterable[str], prefix: str, count: int) -> list[str]:
    """``count`` new vertex ids with the given prefix, avoiding ``taken``."""
    taken = set(taken)
    out = []
    i = 0
    while len(out) < count:
        cand = f"{prefix}{i}"
        if cand not in taken:
            out.append(cand)
        i += 1
    return out
