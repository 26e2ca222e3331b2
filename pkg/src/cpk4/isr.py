"""Independent sets of representatives (ISRs).

Exact backtracking search, the total-domination sufficient condition for an
ISR to exist, and the procedure that merges two ISRs of different families
into one independent set.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable

from .graph_core import (
    Graph,
    PartFamily,
    canonical,
    edge_key,
    restricted_masks,
    total_domination_masks,
    vertex_key,
)

DEFAULT_SUBSET_CAP = 20


class IsrError(ValueError):
    pass


class SearchLimitExceeded(RuntimeError):
    """A search ran past its node budget or size cap."""


@dataclass(frozen=True)
class PartialIsr:
    """An independent vertex set with at most one vertex in each part.

    ``vertices`` may contain vertices that lie outside every part; ``rep`` maps
    each hit part to its unique representative.
    """

    host: Graph
    family: PartFamily
    vertices: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        self.validate()

    def validate(self):
        for v in self.vertices:
            if v not in self.host:
                raise IsrError(f"{v!r} is not a vertex of the host graph")
        if not self.host.is_independent(self.vertices):
            u, v = _some_edge(self.host, self.vertices)
            raise IsrError(f"representatives {u!r} and {v!r} are adjacent")
        for i, p in enumerate(self.family.parts):
            if len(p & self.vertices) > 1:
                raise IsrError(f"part {i} has more than one representative")

    @property
    def rep(self) -> dict[int, str]:
        out = {}
        for i, p in enumerate(self.family.parts):
            hit = p & self.vertices
            if hit:
                out[i] = next(iter(hit))
        return out

    @property
    def hit_set(self) -> set[int]:
        return set(self.rep)

    @property
    def is_full(self) -> bool:
        return len(self.rep) == len(self.family)


class Isr(PartialIsr):
    """A partial ISR that hits every part."""

    def validate(self):
        super().validate()
        missed = [i for i, p in enumerate(self.family.parts) if not (p & self.vertices)]
        if missed:
            raise IsrError(f"parts {missed} have no representative")

    @classmethod
    def from_reps(cls, host: Graph, family: PartFamily, reps: Iterable[str]) -> "Isr":
        return cls(host, family, frozenset(reps))


def _some_edge(g: Graph, vs):
    vs = set(vs)
    for u in canonical(vs):
        for w in canonical(g.neighbors(u) & vs):
            return u, w
    return None


def find_isr(g: Graph, fam: PartFamily, node_budget: int | None = None) -> Isr | None:
    """Exact ISR search.

    Parts are taken in order and candidates in canonical vertex order; after
    each choice every later part must still have an available candidate.
    Returns ``None`` iff no ISR exists.  Raises ``SearchLimitExceeded`` if more
    than ``node_budget`` choices are tried.
    """
    fam.check_over(g)
    masks = g.masks
    cand = [[g.index[v] for v in canonical(p)] for p in fam.parts]
    avail0 = [g.to_mask(p) for p in fam.parts]
    n = len(cand)
    chosen = [0] * n
    nodes = 0

    def go(i: int, avail: list[int]) -> bool:
        nonlocal nodes
        if i == n:
            return True
        for b in cand[i]:
            if not (avail[i] >> b) & 1:
                continue
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                raise SearchLimitExceeded(f"ISR search exceeded {node_budget} nodes")
            block = ~masks[b]
            nxt = avail[:]
            ok = True
            for j in range(i + 1, n):
                nxt[j] &= block
                if not nxt[j]:
                    ok = False
                    break
            if ok:
                chosen[i] = b
                if go(i + 1, nxt):
                    return True
        return False

    if any(a == 0 for a in avail0):
        return None
    if not go(0, avail0):
        return None
    return Isr(g, fam, frozenset(g.vertices[b] for b in chosen))


@dataclass
class HaxellResult:
    passed: bool
    witness: tuple[int, ...] | None = None
    sampled: bool = False
    checked: int = 0

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "FAIL"
        return "NOT-FALSIFIED" if self.sampled else "PASS"


def iter_subsets(n: int):
    """Nonempty subsets of range(n), by size, then lexicographically."""
    for size in range(1, n + 1):
        yield from itertools.combinations(range(n), size)


def check_haxell_condition(
    g: Graph,
    fam: PartFamily,
    cap: int = DEFAULT_SUBSET_CAP,
    samples: int | None = None,
    seed: int = 0,
) -> HaxellResult:
    """Check that every nonempty S has total domination of H_S at least 2|S| - 1.

    With ``samples`` set, ``samples`` random subsets are checked instead of all
    of them and a pass only means "not falsified".  Without it, families with
    more than ``cap`` parts are refused.
    """
    fam.check_over(g)
    n = len(fam)
    if samples is None:
        if n > cap:
            raise SearchLimitExceeded(f"{n} parts exceeds the subset-enumeration cap {cap}")
        subsets = iter_subsets(n)
    else:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(n), rng.randint(1, n)))) for _ in range(samples if n else 0))
    checked = 0
    for S in subsets:
        checked += 1
        masks, universe = restricted_masks(g, fam, S)
        if total_domination_masks(masks, universe) < 2 * len(S) - 1:
            return HaxellResult(False, S, samples is not None, checked)
    return HaxellResult(True, None, samples is not None, checked)


@dataclass(frozen=True)
class EdgeClassification:
    """Edges of G[R_X u R_Y] sorted by role.  An edge may be both an X- and a Y-edge."""

    x_edges: frozenset
    y_edges: frozenset
    xy_edges: frozenset

    def all_edges(self) -> frozenset:
        return self.x_edges | self.y_edges | self.xy_edges


def classify_edges(g: Graph, famX: PartFamily, famY: PartFamily, rx: Isr, ry: Isr) -> EdgeClassification:
    for r, fam, name in ((rx, famX, "X"), (ry, famY, "Y")):
        if r.family != fam or r.host != g:
            raise IsrError(f"the {name} ISR does not belong to the given host and family")
    px, py = famX.part_of, famY.part_of
    pool = rx.vertices | ry.vertices
    xe, ye, xye = set(), set(), set()
    for u in pool:
        for w in g.neighbors(u) & pool:
            e = edge_key(u, w)
            is_x = u in px and px[u] == px.get(w)
            is_y = u in py and py[u] == py.get(w)
            if is_x:
                xe.add(e)
            if is_y:
                ye.add(e)
            if not (is_x or is_y):
                xye.add(e)
    return EdgeClassification(frozenset(xe), frozenset(ye), frozenset(xye))


@dataclass(frozen=True)
class CombineRound:
    step: int
    dangerous: str
    deleted: tuple[str, ...]
    surviving: tuple[str, ...]


@dataclass
class CombineTrace:
    initial: tuple[str, ...] = ()
    rounds: list[CombineRound] = field(default_factory=list)
    final_deleted: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "initial": list(self.initial),
            "rounds": [
                {"step": r.step, "dangerous": r.dangerous, "deleted": list(r.deleted), "surviving": list(r.surviving)}
                for r in self.rounds
            ],
            "step4_deleted": list(self.final_deleted),
        }


def combine_isrs(g: Graph, famX: PartFamily, rx: Isr, famY: PartFamily, ry: Isr) -> tuple[frozenset, CombineTrace]:
    """Merge an ISR of X and an ISR of Y into one independent set R.

    R meets every Y-part.  An X-part whose representative has no crossing
    edge (an edge that is neither an X-edge nor a Y-edge) is still hit; any
    other X-part X is hit together with some crossing neighbour w of its
    representative, i.e. R meets X + {w}.

    R is returned as a plain set: it can meet a part twice when the parts are
    not cliques of ``g``.
    """
    cls = classify_edges(g, famX, famY, rx, ry)
    xy = cls.xy_edges
    x_edges, y_edges = cls.x_edges, cls.y_edges
    key = vertex_key
    in_x = rx.vertices
    in_y = ry.vertices
    current = set(in_x | in_y)
    trace = CombineTrace(initial=tuple(canonical(current)))
    y_order = canonical(in_y)
    x_order = canonical(in_x)

    def nbrs(v):
        return g.neighbors(v) & current

    def split(v):
        plain, crossing = [], []
        for w in nbrs(v):
            (crossing if edge_key(v, w) in xy else plain).append(w)
        return plain, crossing

    def find_dangerous():
        for v in y_order:
            if v not in current:
                continue
            plain, crossing = split(v)
            if not plain and crossing:
                return 1, v
        for v in y_order:
            if v not in current:
                continue
            plain, _ = split(v)
            if len(plain) == 1 and edge_key(v, plain[0]) in x_edges:
                return 2, v
        for v in x_order:
            if v not in current:
                continue
            ns = nbrs(v)
            if len(ns) == 1:
                (w,) = ns
                if edge_key(v, w) in y_edges:
                    return 3, v
        return None

    while True:
        found = find_dangerous()
        if found is None:
            break
        step, v = found
        gone = sorted(nbrs(v), key=key)
        current.difference_update(gone)
        trace.rounds.append(CombineRound(step, v, tuple(gone), tuple(canonical(current))))

    last = [v for v in y_order if v in current and nbrs(v)]
    current.difference_update(last)
    trace.final_deleted = tuple(last)
    return frozenset(current), trace


@dataclass
class CombinationReport:
    independent: bool
    subset: bool
    y_coverage: bool
    missing_y: list[int]
    part_verdicts: list[dict]
    y_exact: bool = True

    @property
    def ok(self) -> bool:
        return self.independent and self.subset and self.y_coverage and all(p["ok"] for p in self.part_verdicts)


def verify_combination(g: Graph, famX: PartFamily, famY: PartFamily, rx, ry, R: Iterable[str]) -> CombinationReport:
    """Check a merged set against the guarantees, without reusing the merge code."""
    R = set(R.vertices if isinstance(R, PartialIsr) else R)
    rxv = set(rx.vertices if isinstance(rx, PartialIsr) else rx)
    ryv = set(ry.vertices if isinstance(ry, PartialIsr) else ry)
    pool = rxv | ryv
    independent = all(not (g.neighbors(v) & R) for v in R if v in g)
    subset = R <= pool
    missing_y = [j for j, Y in enumerate(famY.parts) if not Y & R]
    y_exact = all(len(Y & R) == 1 for Y in famY.parts)

    def same_part(fam, u, w):
        return any(u in p and w in p for p in fam.parts)

    verdicts = []
    for i, X in enumerate(famX.parts):
        reps = X & rxv
        v = next(iter(reps)) if len(reps) == 1 else None
        if v is None:
            verdicts.append({"part": i, "case": "invalid", "ok": False, "witness": None})
            continue
        crossing = [
            w for w in canonical(g.neighbors(v) & pool)
            if not same_part(famX, v, w) and not same_part(famY, v, w)
        ]
        if not crossing:
            ok = bool(X & R)
            verdicts.append({"part": i, "case": "a", "ok": ok, "witness": None})
        else:
            ok = bool(X & R)
            witness = None
            if not ok:
                hits = [w for w in crossing if w in R]
                ok = bool(hits)
                witness = hits[0] if hits else None
            verdicts.append({"part": i, "case": "b", "ok": ok, "witness": witness})
    return CombinationReport(independent, subset, not missing_y, missing_y, verdicts, y_exact)
