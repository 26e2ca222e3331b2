"""Reduce a cycles-plus-K4 instance to a triangles-plus-short-paths 3-colouring instance.

Pipeline: close the base into a 2-regular graph, pick the triangle set M,
break the long cycles, find an ISR of the augmented family, find an ISR of
the cliques, merge the two into R, and return H - R with the cliques minus R
as glued triangles.  Every intermediate object is kept on the trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph_core import (
    Graph,
    GraphError,
    GluedInstance,
    PartFamily,
    build_glued_graph,
    canonical,
    components,
    fresh_ids,
    iter_bits,
    lovasz_partition,
)
from .isr import (
    CombineTrace,
    EdgeClassification,
    Isr,
    SearchLimitExceeded,
    classify_edges,
    combine_isrs,
    find_isr,
)

DEFAULT_EXACT_CAP = 16
LONG_CYCLE = 15
MAX_PATH_LENGTH = 12


class StageFailure(RuntimeError):
    """A pipeline stage could not produce what the theory promises (or hit a cap)."""

    def __init__(self, stage: str, message: str, witness=None, trace=None):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
        self.witness = witness
        self.trace = trace


def complete_to_two_regular(inst: GluedInstance) -> GluedInstance:
    """Join all path components end to end and close them into one cycle.

    Cycle components are left alone.  If fewer than three path vertices exist,
    fresh vertices (outside every clique) pad the cycle to length three.
    """
    inst.validate()
    chain: list[str] = []
    for comp in components(inst.base):
        if comp.kind in ("path", "isolated"):
            chain.extend(comp.vertices)
    if not chain:
        return inst
    if len(chain) < 3:
        chain.extend(fresh_ids(inst.base.vertices, "_pad", 3 - len(chain)))
    edges = inst.base.edges()
    extra = [(chain[i], chain[(i + 1) % len(chain)]) for i in range(len(chain))]
    base = Graph(set(inst.base.vertices) | set(chain), edges + extra)
    return GluedInstance(base, inst.cliques, inst.order)


@dataclass(frozen=True)
class Parts:
    """Base components as parts, with the index set of triangles."""

    family: PartFamily
    cycles: tuple[tuple[str, ...], ...]
    triangles: tuple[int, ...]


def base_parts(inst: GluedInstance) -> Parts:
    comps = components(inst.base)
    for c in comps:
        if c.kind != "cycle":
            raise GraphError("base must be 2-regular", rule="two-regular")
    labels = tuple("triangle" if len(c.vertices) == 3 else "cycle" for c in comps)
    fam = PartFamily(tuple(frozenset(c.vertices) for c in comps), labels)
    tri = tuple(i for i, c in enumerate(comps) if len(c.vertices) == 3)
    return Parts(fam, tuple(c.vertices for c in comps), tri)


def _link_pairs(inst: GluedInstance, parts: Parts) -> set[tuple[int, int]]:
    part_of = parts.family.part_of
    tri = set(parts.triangles)
    pairs = set()
    for Y in inst.cliques:
        hit = {part_of[v] for v in Y}
        if not any(i not in tri for i in hit):
            continue  # 2-regular base: non-triangle parts are cycles of length >= 4
        for i, j in itertools.combinations(sorted(hit & tri), 2):
            pairs.add((i, j))
    return pairs


def link_graph(inst: GluedInstance, W, parts: Parts | None = None) -> Graph:
    """Graph on the triangle indices in W; two are adjacent when a glued clique
    meets both of them and also a cycle of length at least four."""
    parts = parts or base_parts(inst)
    W = set(W)
    if not W <= set(parts.triangles):
        raise ValueError("W must consist of triangle parts")
    pairs = _link_pairs(inst, parts)
    return Graph((str(i) for i in W), ((str(i), str(j)) for i, j in pairs if i in W and j in W))


@dataclass(frozen=True)
class MSelection:
    M: tuple[int, ...]
    link_graph: Graph
    method: str  # "EXACT" or "HEURISTIC"
    t: int
    all_link_max_degree: int = 0
    all_link_edges: int = 0

    @property
    def score(self) -> tuple[int, int]:
        return (len(self.M), self.link_graph.num_edges())


def _edges_within(adj: dict[int, int], members: int) -> tuple[int, int]:
    """(max degree, edge count) of the link graph restricted to ``members``."""
    top = 0
    total = 0
    for i in iter_bits(members):
        d = (adj[i] & members).bit_count()
        total += d
        top = max(top, d)
    return top, total // 2


def select_M(inst: GluedInstance, exact_cap: int = DEFAULT_EXACT_CAP, method: str | None = None,
             parts: Parts | None = None) -> MSelection:
    """Choose the triangle set M: link max degree <= 1, as large as possible,
    then with as few link edges as possible.

    Exhaustive when there are at most ``exact_cap`` triangles, otherwise a
    local search seeded from a degree-1 partition of the full link graph.
    """
    parts = parts or base_parts(inst)
    tri = list(parts.triangles)
    t = len(tri)
    full = link_graph(inst, tri, parts)
    pos = {i: k for k, i in enumerate(tri)}
    adj = {k: 0 for k in range(t)}
    for a, b in full.edges():
        ka, kb = pos[int(a)], pos[int(b)]
        adj[ka] |= 1 << kb
        adj[kb] |= 1 << ka
    if method is None:
        method = "EXACT" if t <= exact_cap else "HEURISTIC"

    if method == "EXACT":
        chosen = _select_exact(adj, t)
    elif method == "HEURISTIC":
        chosen = _select_local(full, adj, tri, pos)
    else:
        raise ValueError(f"unknown selection method {method!r}")
    M = tuple(tri[k] for k in iter_bits(chosen))
    return MSelection(M, link_graph(inst, M, parts), method, t, full.max_degree(), full.num_edges())


def _select_exact(adj: dict[int, int], t: int) -> int:
    for size in range(t, -1, -1):
        best = None
        for combo in itertools.combinations(range(t), size):
            members = 0
            for k in combo:
                members |= 1 << k
            top, count = _edges_within(adj, members)
            if top <= 1 and (best is None or count < best[0]):
                best = (count, members)
        if best is not None:
            return best[1]
    return 0


def _select_local(full: Graph, adj: dict[int, int], tri: list[int], pos: dict[int, int]) -> int:
    lp = lovasz_partition(full, 1)
    largest = max(lp.family.parts, key=len, default=frozenset())
    members = 0
    for name in largest:
        members |= 1 << pos[int(name)]
    t = len(tri)
    changed = True
    while changed:
        changed = False
        for k in range(t):
            if members >> k & 1:
                continue
            top, _ = _edges_within(adj, members | 1 << k)
            if top <= 1:
                members |= 1 << k
                changed = True
        if changed:
            continue
        _, edges_now = _edges_within(adj, members)
        for k in range(t):
            if members >> k & 1 or (adj[k] & members).bit_count() != 1:
                continue
            other = (adj[k] & members).bit_length() - 1
            swapped = (members & ~(1 << other)) | 1 << k
            top, edges_new = _edges_within(adj, swapped)
            if top <= 1 and edges_new < edges_now:
                members = swapped
                changed = True
                break
    return members


@dataclass(frozen=True)
class BrokenCycle:
    part: int
    rotation: tuple[str, ...]
    deleted: tuple[str, ...]
    segments: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class CycleBreaking:
    L: tuple[int, ...]
    cycles: tuple[BrokenCycle, ...]

    @property
    def deleted(self) -> set[str]:
        return {v for c in self.cycles for v in c.deleted}


def break_cycle(rotation) -> tuple[tuple[str, ...], tuple[tuple[str, ...], ...]]:
    """Delete x_1, x_6, x_11, ... and return (deleted, segments) for a cycle x_1..x_l."""
    x = list(rotation)
    l = len(x)
    p = l // 5
    deleted = tuple(x[5 * j - 5] for j in range(1, p + 1))  # x_{5j-4}, 1-based
    segs = [tuple(x[5 * j - 4:5 * j]) for j in range(1, p)]  # x_{5j-3}..x_{5j}
    segs.append(tuple(x[5 * p - 4:]))
    return deleted, tuple(segs)


def break_long_cycles(inst: GluedInstance, parts: Parts | None = None) -> CycleBreaking:
    parts = parts or base_parts(inst)
    out = []
    for i, rot in enumerate(parts.cycles):
        if len(rot) >= LONG_CYCLE:
            deleted, segs = break_cycle(rot)
            out.append(BrokenCycle(i, rot, deleted, segs))
    return CycleBreaking(tuple(c.part for c in out), tuple(out))


def split_family(parts: Parts, breaking: CycleBreaking) -> tuple[PartFamily, dict[int, int], tuple[int, ...]]:
    """X' from X: each long cycle replaced by its segments.

    Returns the family, the map from old part index to new index for unbroken
    parts, and the new indices of the triangle parts.
    """
    broken = {c.part: c for c in breaking.cycles}
    new_parts, labels, remap = [], [], {}
    for i, p in enumerate(parts.family.parts):
        if i in broken:
            for seg in broken[i].segments:
                new_parts.append(frozenset(seg))
                labels.append("segment")
        else:
            remap[i] = len(new_parts)
            new_parts.append(p)
            labels.append(parts.family.labels[i])
    tri = tuple(remap[i] for i in parts.triangles)
    return PartFamily(tuple(new_parts), tuple(labels)), remap, tri


def build_augmented(g1: Graph, fam1: PartFamily, M: tuple[int, ...]) -> tuple[Graph, PartFamily, tuple[tuple[str, ...], ...]]:
    """G'' = G' plus m disjoint copies of K_m; the j-th M-part takes the j-th vertex of every copy.

    ``M`` holds indices into ``fam1``.  Returns (G'', X'', copies).
    """
    m = len(M)
    if m == 0:
        return g1, fam1, ()
    ids = fresh_ids(g1.vertices, "_K", m * m)
    copies = tuple(tuple(ids[c * m + j] for j in range(m)) for c in range(m))
    edges = g1.edges() + [e for copy in copies for e in itertools.combinations(copy, 2)]
    g2 = Graph(list(g1.vertices) + ids, edges)
    slot = {i: j for j, i in enumerate(M)}
    new_parts = []
    for i, p in enumerate(fam1.parts):
        if i in slot:
            p = p | {copy[slot[i]] for copy in copies}
        new_parts.append(p)
    return g2, PartFamily(tuple(new_parts), fam1.labels), copies


@dataclass(frozen=True)
class ReducedInstance:
    base: Graph
    glued_triangles: tuple[tuple[str, ...], ...]
    origin_map: dict = field(default_factory=dict, compare=False)

    def as_instance(self) -> GluedInstance:
        return GluedInstance(self.base, self.glued_triangles, 3)


@dataclass
class ReductionTrace:
    original: GluedInstance
    normalized: GluedInstance | None = None
    G: Graph | None = None
    parts: Parts | None = None
    selection: MSelection | None = None
    breaking: CycleBreaking | None = None
    G1: Graph | None = None
    fam1: PartFamily | None = None
    M1: tuple[int, ...] = ()
    triangles1: tuple[int, ...] = ()
    G2: Graph | None = None
    fam2: PartFamily | None = None
    copies: tuple = ()
    isr2: Isr | None = None
    famXt: PartFamily | None = None
    R_Xt: Isr | None = None
    famY: PartFamily | None = None
    R_Y: Isr | None = None
    classification: EdgeClassification | None = None
    combine: CombineTrace | None = None
    R: Isr | None = None
    H1: Graph | None = None
    reduced: ReducedInstance | None = None

    @property
    def m(self) -> int:
        return len(self.M1)

    def to_dict(self) -> dict:
        def fam(f):
            return None if f is None else [canonical(p) for p in f.parts]

        def vs(x):
            return None if x is None else canonical(x.vertices if hasattr(x, "vertices") else x)

        sel = self.selection
        cls = self.classification
        return {
            "normalized_vertices": len(self.normalized.base) if self.normalized else None,
            "parts": fam(self.parts.family) if self.parts else None,
            "triangles": list(self.parts.triangles) if self.parts else None,
            "link_graph_edges": [list(e) for e in link_graph(self.normalized, self.parts.triangles, self.parts).edges()]
            if self.parts else None,
            "M": {
                "parts": list(sel.M), "method": sel.method, "t": sel.t,
                "link_edges": sel.link_graph.num_edges(),
                "literal_link_max_degree": sel.all_link_max_degree,
                "literal_link_edges": sel.all_link_edges,
            } if sel else None,
            "cycle_breaking": [
                {"part": c.part, "rotation": list(c.rotation), "deleted": list(c.deleted),
                 "segments": [list(s) for s in c.segments]}
                for c in self.breaking.cycles
            ] if self.breaking else None,
            "X1": fam(self.fam1),
            "M1": list(self.M1),
            "X2": fam(self.fam2),
            "R_Xtilde": vs(self.R_Xt),
            "R_Y": vs(self.R_Y),
            "edges": {
                "x": [list(e) for e in sorted(cls.x_edges)],
                "y": [list(e) for e in sorted(cls.y_edges)],
                "xy": [list(e) for e in sorted(cls.xy_edges)],
            } if cls else None,
            "combine": self.combine.to_dict() if self.combine else None,
            "R": vs(self.R),
        }


def reduce(inst: GluedInstance, exact_cap: int = DEFAULT_EXACT_CAP, isr_budget: int | None = None
           ) -> tuple[ReducedInstance, ReductionTrace]:
    """Run the full reduction.  Raises ``StageFailure`` naming the stage that failed."""
    if inst.order != 4:
        raise GraphError("reduction needs an order-4 instance", rule="order")
    inst.validate()
    tr = ReductionTrace(original=inst)
    norm = complete_to_two_regular(inst)
    tr.normalized = norm
    G = build_glued_graph(norm)
    tr.G = G
    parts = base_parts(norm)
    tr.parts = parts
    tr.selection = select_M(norm, exact_cap, parts=parts)
    tr.breaking = break_long_cycles(norm, parts)

    tr.G1 = G.remove_vertices(tr.breaking.deleted)
    fam1, remap, tri1 = split_family(parts, tr.breaking)
    tr.fam1 = fam1
    tr.triangles1 = tri1
    tr.M1 = tuple(remap[i] for i in tr.selection.M)
    tr.G2, tr.fam2, tr.copies = build_augmented(tr.G1, fam1, tr.M1)

    try:
        isr2 = find_isr(tr.G2, tr.fam2, isr_budget)
    except SearchLimitExceeded as exc:
        raise StageFailure("isr_augmented", str(exc), trace=tr) from exc
    if isr2 is None:
        raise StageFailure("isr_augmented", "augmented family has no ISR", witness=fam1, trace=tr)
    tr.isr2 = isr2

    keep = [i for i in range(len(fam1)) if i not in set(tr.M1)]
    famXt = PartFamily(tuple(fam1.parts[i] for i in keep), tuple(fam1.labels[i] for i in keep))
    reps = isr2.rep
    tr.famXt = famXt
    try:
        tr.R_Xt = Isr(G, famXt, frozenset(reps[i] for i in keep))
    except ValueError as exc:
        raise StageFailure("restrict", str(exc), trace=tr) from exc

    famY = norm.clique_family
    tr.famY = famY
    try:
        ry = find_isr(norm.base, famY, isr_budget)
    except SearchLimitExceeded as exc:
        raise StageFailure("isr_cliques", str(exc), trace=tr) from exc
    if ry is None:
        raise StageFailure("isr_cliques", "clique family has no ISR in the base", trace=tr)
    try:
        tr.R_Y = Isr(G, famY, ry.vertices)
    except ValueError as exc:
        raise StageFailure("isr_cliques", str(exc), trace=tr) from exc

    tr.classification = classify_edges(G, famXt, famY, tr.R_Xt, tr.R_Y)
    R, tr.combine = combine_isrs(G, famXt, tr.R_Xt, famY, tr.R_Y)
    try:
        tr.R = Isr(G, famY, R)
    except ValueError as exc:
        raise StageFailure("combine", str(exc), trace=tr) from exc

    H1 = norm.base.remove_vertices(R)
    tr.H1 = H1
    triangles = tuple(tuple(canonical(set(Y) - R)) for Y in norm.cliques)
    red = ReducedInstance(H1, triangles, {v: v for v in H1.vertices})
    tr.reduced = red
    return red, tr


def path_linked_pairs(red: ReducedInstance, literal: bool = False) -> list[tuple[int, int]]:
    """Pairs of base-triangle indices joined by a glued triangle whose third
    vertex lies on a base path component of length at least two.

    Indices refer to the triangle components of ``red.base`` in component
    order.  With ``literal`` any path of G counts, which every vertex of a
    glued triangle trivially lies on.
    """
    comps = components(red.base)
    tri_of: dict[str, int] = {}
    long_path: set[str] = set()
    k = 0
    for c in comps:
        if c.kind == "cycle" and len(c.vertices) == 3:
            for v in c.vertices:
                tri_of[v] = k
            k += 1
        elif c.kind == "path" and c.length >= 2:
            long_path |= set(c.vertices)
    pairs = set()
    for Y in red.glued_triangles:
        for a, b, c in ((Y[0], Y[1], Y[2]), (Y[0], Y[2], Y[1]), (Y[1], Y[2], Y[0])):
            ta, tb = tri_of.get(a), tri_of.get(b)
            if ta is None or tb is None or ta == tb:
                continue
            if literal or c in long_path:
                pairs.add((min(ta, tb), max(ta, tb)))
    return sorted(pairs)


@dataclass
class ReducedReport:
    components_ok: bool
    bad_components: list[dict]
    triangles_ok: bool
    bad_triangles: list[tuple]
    linked_pairs: list[tuple[int, int]]
    linked_ok: bool
    over_linked: list[int]
    literal_pairs: int

    @property
    def ok(self) -> bool:
        return self.components_ok and self.triangles_ok and self.linked_ok

    def to_dict(self) -> dict:
        return {
            "components_ok": self.components_ok,
            "bad_components": self.bad_components,
            "triangles_ok": self.triangles_ok,
            "bad_triangles": [list(t) for t in self.bad_triangles],
            "path_linked_pairs": [list(p) for p in self.linked_pairs],
            "path_linked_ok": self.linked_ok,
            "over_linked_triangles": self.over_linked,
            "literal_path_linked_pairs": self.literal_pairs,
        }


def verify_reduced(red: ReducedInstance) -> ReducedReport:
    bad_comp = []
    for c in components(red.base):
        if c.kind == "cycle" and len(c.vertices) == 3:
            continue
        if c.kind in ("path", "isolated") and c.length <= MAX_PATH_LENGTH:
            continue
        bad_comp.append({"kind": c.kind, "vertices": list(c.vertices)})
    seen: set[str] = set()
    bad_tri = []
    for Y in red.glued_triangles:
        if len(set(Y)) != 3 or seen & set(Y) or not set(Y) <= set(red.base.vertices):
            bad_tri.append(tuple(Y))
        seen |= set(Y)
    pairs = path_linked_pairs(red)
    deg: dict[int, int] = {}
    for a, b in pairs:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    over = sorted(k for k, d in deg.items() if d > 1)
    return ReducedReport(not bad_comp, bad_comp, not bad_tri, bad_tri, pairs, not over, over,
                         len(path_linked_pairs(red, literal=True)))
