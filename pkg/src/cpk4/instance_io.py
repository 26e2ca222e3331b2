"""The ``cpk4 v1`` text format, instance generators and the bad-gluing search.

Format (one item per line, ``#`` starts a comment)::

    cpk4 v1 order=4
    cycle a b c d
    path e f
    glue a b e f
    meta seed 7
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .coloring import chromatic_decision
from .graph_core import Graph, GraphError, GluedInstance, canonical, components, vertex_key

FORMAT_VERSION = 1
RNG_NAME = "numpy-PCG64"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, rule: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.rule = rule


@dataclass
class InstanceDocument:
    clique_order: int
    components: list[tuple[str, list[str]]]
    cliques: list[list[str]]
    metadata: dict[str, str] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def to_instance(self) -> GluedInstance:
        verts, edges = [], []
        for kind, vs in self.components:
            verts.extend(vs)
            edges.extend(zip(vs, vs[1:]))
            if kind == "cycle":
                edges.append((vs[-1], vs[0]))
        inst = GluedInstance(Graph(verts, edges), tuple(tuple(c) for c in self.cliques), self.clique_order)
        inst.validate()
        return inst

    @classmethod
    def from_instance(cls, inst: GluedInstance, metadata: dict | None = None) -> "InstanceDocument":
        inst.validate()
        comps = []
        for c in components(inst.base):
            comps.append(("cycle" if c.kind == "cycle" else "path", list(c.vertices)))
        cliques = sorted((canonical(c) for c in inst.cliques), key=lambda c: vertex_key(c[0]))
        return cls(inst.order, comps, cliques, dict(metadata or {}))


def parse_document(text: str) -> InstanceDocument:
    doc = None
    declared: dict[str, int] = {}
    glue_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if doc is None:
            if len(words) != 3 or words[0] != "cpk4" or words[1] != "v1" or not words[2].startswith("order="):
                raise FormatError("expected header 'cpk4 v1 order=<3|4>'", lineno, "header")
            try:
                order = int(words[2][len("order="):])
            except ValueError:
                raise FormatError(f"bad clique order {words[2]!r}", lineno, "header") from None
            if order not in (3, 4):
                raise FormatError(f"clique order must be 3 or 4, got {order}", lineno, "order")
            doc = InstanceDocument(order, [], [])
            continue
        head, args = words[0], words[1:]
        if head in ("cycle", "path"):
            if not args:
                raise FormatError(f"empty {head}", lineno, "syntax")
            if head == "cycle" and len(args) < 3:
                raise FormatError("a cycle needs at least three vertices", lineno, "cycle-length")
            for v in args:
                if v in declared:
                    raise FormatError(f"vertex {v!r} already declared on line {declared[v]}", lineno, "vertex-unique")
                declared[v] = lineno
            doc.components.append((head, args))
        elif head == "glue":
            # checked once every component has been declared
            doc.cliques.append(args)
            glue_lines.append(lineno)
        elif head == "meta":
            if not args:
                raise FormatError("meta needs a key", lineno, "syntax")
            doc.metadata[args[0]] = " ".join(args[1:])
        else:
            raise FormatError(f"unknown directive {head!r}", lineno, "syntax")
    if doc is None:
        raise FormatError("missing header", None, "header")
    owner: dict[str, int] = {}
    for clique, lineno in zip(doc.cliques, glue_lines):
        if len(clique) != doc.clique_order or len(set(clique)) != len(clique):
            raise FormatError(f"clique must have {doc.clique_order} distinct vertices", lineno, "clique-size")
        for v in clique:
            if v not in declared:
                raise FormatError(f"clique vertex {v!r} is not declared", lineno, "clique-undeclared")
            if v in owner:
                raise FormatError(f"vertex {v!r} already glued on line {owner[v]}", lineno, "clique-disjoint")
            owner[v] = lineno
    return doc


def parse(text: str) -> GluedInstance:
    return parse_document(text).to_instance()


def serialize_document(doc: InstanceDocument) -> str:
    """Canonical text: components by smallest vertex, cliques sorted, metadata by key."""
    canon = InstanceDocument.from_instance(doc.to_instance(), doc.metadata)
    lines = [f"cpk4 v{canon.format_version} order={canon.clique_order}"]
    lines += [f"{kind} {' '.join(vs)}" for kind, vs in canon.components]
    lines += [f"glue {' '.join(c)}" for c in canon.cliques]
    lines += [f"meta {k} {v}".rstrip() for k, v in sorted(canon.metadata.items())]
    return "\n".join(lines) + "\n"


def serialize(inst: GluedInstance, metadata: dict | None = None) -> str:
    return serialize_document(InstanceDocument.from_instance(inst, metadata))


def canonicalize(text: str) -> str:
    return serialize_document(parse_document(text))


# generators

@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    cycles: tuple[tuple[int, int], ...] = ()  # (length, count)
    triangle_count: int = 0
    clique_order: int = 4
    coverage: float = 1.0

    def num_vertices(self) -> int:
        return sum(l * c for l, c in self.cycles) + 3 * self.triangle_count

    def num_cliques(self) -> int:
        return int(self.coverage * self.num_vertices() + 1e-9) // self.clique_order

    def validate(self):
        if any(l < 3 or c < 0 for l, c in self.cycles):
            raise GraphError("cycle lengths must be at least 3 and counts non-negative", rule="generator")
        if self.clique_order not in (3, 4):
            raise GraphError("clique order must be 3 or 4", rule="generator")
        if not 0.0 <= self.coverage <= 1.0:
            raise GraphError("coverage must lie in [0, 1]", rule="generator")
        if self.triangle_count < 0:
            raise GraphError("triangle count must be non-negative", rule="generator")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _cycles_graph(lengths: list[int]) -> tuple[Graph, list[str]]:
    verts, edges = [], []
    for l in lengths:
        start = len(verts)
        cyc = [f"v{start + i}" for i in range(l)]
        verts += cyc
        edges += [(cyc[i], cyc[(i + 1) % l]) for i in range(l)]
    return Graph(verts, edges), verts


def gen_random(spec: GeneratorSpec) -> GluedInstance:
    """Disjoint cycles (triangles first), then vertex-disjoint cliques on random vertices."""
    spec.validate()
    lengths = [3] * spec.triangle_count + [l for l, c in spec.cycles for _ in range(c)]
    base, verts = _cycles_graph(lengths)
    rng = rng_for(spec.seed)
    q = spec.num_cliques()
    picked = [verts[i] for i in rng.permutation(len(verts))[: q * spec.clique_order]]
    cliques = tuple(tuple(picked[j * spec.clique_order:(j + 1) * spec.clique_order]) for j in range(q))
    return GluedInstance(base, cliques, spec.clique_order).validate()


def spec_metadata(spec: GeneratorSpec) -> dict[str, str]:
    return {
        "rng": RNG_NAME,
        "seed": str(spec.seed),
        "cycles": ",".join(f"{l}:{c}" for l, c in spec.cycles) or "-",
        "triangles": str(spec.triangle_count),
        "coverage": repr(spec.coverage),
    }


def gen_cycle_plus_triangles(k: int, seed: int) -> GluedInstance:
    """A single cycle of length 3k with its vertices split into k glued triangles."""
    if k < 1:
        raise ValueError("k must be at least 1")
    base, verts = _cycles_graph([3 * k])
    perm = [verts[i] for i in rng_for(seed).permutation(3 * k)]
    return GluedInstance(base, tuple(tuple(perm[3 * j:3 * j + 3]) for j in range(k)), 3).validate()


# search for triangle gluings that force a fourth colour

MAX_BASE_COLOURINGS = 200_000


def _component_colourings(g: Graph, comp) -> list[dict[str, int]]:
    vs = list(comp.vertices)
    out = []

    def go(i, acc):
        if i == len(vs):
            out.append(dict(zip(vs, acc)))
            return
        for c in range(3):
            if all(acc[j] != c for j in range(i) if g.has_edge(vs[i], vs[j])):
                acc.append(c)
                go(i + 1, acc)
                acc.pop()

    go(0, [])
    return out


def base_colourings(base: Graph, limit: int = MAX_BASE_COLOURINGS) -> list[dict[str, int]] | None:
    """All proper 3-colourings of a max-degree-2 graph, or ``None`` past ``limit``."""
    per = [_component_colourings(base, c) for c in components(base)]
    total = 1
    for p in per:
        total *= len(p)
    if total > limit:
        return None
    out = []
    for combo in itertools.product(*per):
        col = {}
        for part in combo:
            col.update(part)
        out.append(col)
    return out


def search_bad_gluing(base: Graph, budget: int, seed: int = 0) -> GluedInstance | None:
    """Look for vertex-disjoint triangles glued onto ``base`` that make it 4-chromatic.

    Depth-first over maximal triangle packings (the smallest uncovered vertex
    joins a triangle, or is left out while fewer than |V| mod 3 vertices have
    been), with the candidate order shuffled by ``seed``.  Each 3-colouring of
    the base is a bit; a triangle keeps the colourings in which it is rainbow,
    and a packing whose surviving set is empty admits no 3-colouring.  Returns
    ``None`` when ``budget`` search nodes are spent or the space is exhausted.
    Every hit is re-certified with the exact colouring oracle.
    """
    if base.max_degree() > 2:
        raise GraphError("base graph has a vertex of degree > 2", rule="max-degree")
    cols = base_colourings(base)
    if cols is None:
        raise GraphError("base has too many 3-colourings for the bitset search", rule="size")
    if not cols:
        return None  # base itself needs 4 colours; no gluing question to ask
    verts = list(base.vertices)
    n = len(verts)
    colour_table = [[col[v] for v in verts] for col in cols]
    rainbow_cache: dict[tuple[int, int, int], int] = {}

    def rainbow(a, b, c):
        key = (a, b, c)
        if key not in rainbow_cache:
            bits = 0
            for s, row in enumerate(colour_table):
                if row[a] != row[b] and row[a] != row[c] and row[b] != row[c]:
                    bits |= 1 << s
            rainbow_cache[key] = bits
        return rainbow_cache[key]

    rng = rng_for(seed)
    skips_allowed = n % 3
    all_cols = (1 << len(cols)) - 1
    nodes = 0
    found = None

    def go(free: list[int], alive: int, skips: int, chosen: list[tuple[int, int, int]]) -> bool:
        nonlocal nodes, found
        nodes += 1
        if nodes > budget:
            return False
        if not alive:
            found = list(chosen)
            return True
        if len(free) < 3:
            return False
        a = free[0]
        rest = free[1:]
        options = [(b, c) for b, c in itertools.combinations(rest, 2)]
        order = rng.permutation(len(options)) if options else []
        for o in order:
            b, c = options[o]
            bits = alive & rainbow(a, b, c)
            chosen.append((a, b, c))
            if go([x for x in rest if x != b and x != c], bits, skips, chosen):
                return True
            chosen.pop()
            if nodes > budget:
                return False
        if skips < skips_allowed:
            return go(rest, alive, skips + 1, chosen)
        return False

    go(list(range(n)), all_cols, 0, [])
    if found is None:
        return None
    # complete to a maximal packing: extra triangles only add edges
    covered = {x for t in found for x in t}
    rest = [i for i in range(n) if i not in covered]
    while len(rest) >= 3:
        found.append(tuple(rest[:3]))
        rest = rest[3:]
    inst = GluedInstance(base, tuple(tuple(verts[i] for i in t) for t in found), 3).validate()
    g = inst.graph
    if chromatic_decision(g, 3, cap=None) is not None or chromatic_decision(g, 4, cap=None) is None:
        raise AssertionError("bitset search and colouring oracle disagree")
    return inst
