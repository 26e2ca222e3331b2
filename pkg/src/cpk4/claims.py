"""Claim checks run against a reduction trace or a reduced instance.

Each check returns a ``ClaimResult``; the registry order below is the order
in which reports list them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graph_core import Graph, component_masks, iter_bits, total_domination_masks
from .isr import DEFAULT_SUBSET_CAP, SearchLimitExceeded, check_haxell_condition, iter_subsets, verify_combination
from .reduction import ReducedInstance, ReductionTrace, link_graph, verify_reduced

CLAIM_IDS = ("edgedeg", "msize", "compbound", "totdom", "hprime", "pathlinked", "combine_ab", "isr4", "domISR")
EXACT_CROSSCHECK_CAP = 12


@dataclass
class ClaimResult:
    status: str  # PASS, FAIL or SKIPPED
    witness: object = None
    detail: dict = field(default_factory=dict)
    sampled: bool = False

    def to_dict(self) -> dict:
        out = {"status": self.status, "sampled": self.sampled, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def skipped(reason: str) -> ClaimResult:
    return ClaimResult("SKIPPED", detail={"reason": reason})


class SubsetSweep:
    """Part-restricted subgraphs of one host/family, as bitmasks."""

    def __init__(self, g: Graph, fam):
        self.g = g
        self.masks = g.masks
        self.part_mask = [g.to_mask(p) for p in fam.parts]
        self.n = len(fam)

    def restricted(self, S) -> tuple[list[int], int]:
        universe = 0
        for i in S:
            universe |= self.part_mask[i]
        out = list(self.masks)
        for i in S:
            pm = self.part_mask[i]
            keep = universe & ~pm
            for b in iter_bits(pm):
                out[b] = self.masks[b] & keep
        return out, universe


def subsets_for(n: int, cap: int, budget: int | None, seed: int):
    """(iterable of S, sampled flag), or None when the sweep must be skipped."""
    if n <= cap:
        return iter_subsets(n), False
    if not budget:
        return None
    rng = random.Random(seed)
    return (tuple(sorted(rng.sample(range(n), rng.randint(1, n)))) for _ in range(budget)), True


def check_edgedeg(tr: ReductionTrace) -> ClaimResult:
    cls = tr.classification
    worst = None
    for rep_set, edges, kind in ((tr.R_Xt.vertices, cls.y_edges, "Y"), (tr.R_Y.vertices, cls.x_edges, "X")):
        for v in sorted(rep_set):
            d = sum(1 for e in edges if v in e)
            if d > 1:
                worst = {"vertex": v, "edge_kind": kind, "count": d}
                return ClaimResult("FAIL", worst)
    return ClaimResult("PASS")


def _exact_m_oracle(tr: ReductionTrace) -> tuple[int, int]:
    """Best (size, -edges) over all triangle subsets, straight from the link-graph definition."""
    tri = tr.parts.triangles
    best = (0, 0)
    for mask in range(1 << len(tri)):
        W = [tri[k] for k in range(len(tri)) if mask >> k & 1]
        lg = link_graph(tr.normalized, W, tr.parts)
        if lg.max_degree() <= 1:
            best = max(best, (len(W), -lg.num_edges()))
    return best


def check_msize(tr: ReductionTrace, crosscheck_cap: int = EXACT_CROSSCHECK_CAP) -> ClaimResult:
    sel = tr.selection
    detail = {"M": len(sel.M), "t": sel.t, "method": sel.method, "link_edges": sel.link_graph.num_edges()}
    if 4 * len(sel.M) < sel.t:
        return ClaimResult("FAIL", {"M": len(sel.M), "t": sel.t}, detail)
    if sel.link_graph.max_degree() > 1:
        return ClaimResult("FAIL", {"link_max_degree": sel.link_graph.max_degree()}, detail)
    if sel.t <= crosscheck_cap:
        size, neg_edges = _exact_m_oracle(tr)
        detail["oracle"] = {"size": size, "edges": -neg_edges}
        if sel.method == "EXACT" and (len(sel.M), sel.link_graph.num_edges()) != (size, -neg_edges):
            return ClaimResult("FAIL", {"selected": list(sel.M)}, detail)
        if len(sel.M) > size:
            return ClaimResult("FAIL", {"selected": list(sel.M)}, detail)
    return ClaimResult("PASS", detail=detail)


def check_compbound(tr: ReductionTrace, cap: int = DEFAULT_SUBSET_CAP, budget: int | None = None,
                    seed: int = 0) -> ClaimResult:
    plan = subsets_for(len(tr.fam1), cap, budget, seed)
    if plan is None:
        return skipped(f"{len(tr.fam1)} parts exceeds the cap {cap} and no sampling budget was given")
    subsets, sampled = plan
    sweep = SubsetSweep(tr.G1, tr.fam1)
    tri = set(tr.triangles1)
    M = set(tr.M1)
    checked = 0
    for S in subsets:
        checked += 1
        masks, universe = sweep.restricted(S)
        size = universe.bit_count()
        comps = component_masks(masks, universe)
        ts = sum(1 for i in S if i in tri)
        witness = {"S": list(S), "components": len(comps), "vertices": size, "t_s": ts}
        if any(c.bit_count() > 4 for c in comps):
            return ClaimResult("FAIL", dict(witness, rule="component-size"), sampled=sampled)
        if 4 * len(comps) < size:
            return ClaimResult("FAIL", dict(witness, rule="comp>=V/4"), sampled=sampled)
        if not (M & set(S)) and 4 * len(comps) < size + ts:
            return ClaimResult("FAIL", dict(witness, rule="comp>=(V+t_s)/4"), sampled=sampled)
        if size < 4 * len(S) - ts:
            return ClaimResult("FAIL", dict(witness, rule="V>=4|S|-t_s"), sampled=sampled)
    return ClaimResult("PASS", detail={"subsets": checked}, sampled=sampled)


def check_totdom(tr: ReductionTrace, cap: int = DEFAULT_SUBSET_CAP, budget: int | None = None,
                 seed: int = 0) -> ClaimResult:
    plan = subsets_for(len(tr.fam2), cap, budget, seed)
    if plan is None:
        return skipped(f"{len(tr.fam2)} parts exceeds the cap {cap} and no sampling budget was given")
    subsets, sampled = plan
    sweep = SubsetSweep(tr.G2, tr.fam2)
    checked = 0
    for S in subsets:
        checked += 1
        masks, universe = sweep.restricted(S)
        gamma = total_domination_masks(masks, universe)
        if gamma < 2 * len(S):
            return ClaimResult("FAIL", {"S": list(S), "total_domination": gamma}, sampled=sampled)
    return ClaimResult("PASS", detail={"subsets": checked}, sampled=sampled)


def check_hprime(red: ReducedInstance) -> ClaimResult:
    rep = verify_reduced(red)
    if not rep.components_ok:
        return ClaimResult("FAIL", rep.bad_components[0], {"bad": len(rep.bad_components)})
    if not rep.triangles_ok:
        return ClaimResult("FAIL", {"glued_triangle": list(rep.bad_triangles[0])})
    return ClaimResult("PASS")


def check_pathlinked(red: ReducedInstance) -> ClaimResult:
    rep = verify_reduced(red)
    detail = {"pairs": len(rep.linked_pairs), "literal_pairs": rep.literal_pairs}
    if not rep.linked_ok:
        return ClaimResult("FAIL", {"triangles": rep.over_linked}, detail)
    return ClaimResult("PASS", detail=detail)


def check_combine_ab(tr: ReductionTrace) -> ClaimResult:
    rep = verify_combination(tr.G, tr.famXt, tr.famY, tr.R_Xt, tr.R_Y, tr.R.vertices)
    detail = {"rounds": len(tr.combine.rounds), "step4_deleted": len(tr.combine.final_deleted)}
    if not rep.ok:
        bad = [p for p in rep.part_verdicts if not p["ok"]]
        witness = {"independent": rep.independent, "subset": rep.subset, "missing_y": rep.missing_y,
                   "parts": [p["part"] for p in bad]}
        return ClaimResult("FAIL", witness, detail)
    return ClaimResult("PASS", detail=detail)


def check_isr4(tr: ReductionTrace) -> ClaimResult:
    base = tr.normalized.base
    if base.max_degree() > 2 or any(len(Y) < 4 for Y in tr.famY.parts):
        return skipped("hypotheses do not hold")
    if tr.R_Y is None:
        return ClaimResult("FAIL", {"stage": "isr_cliques"})
    return ClaimResult("PASS", detail={"parts": len(tr.famY)})


def check_domisr(tr: ReductionTrace, cap: int = DEFAULT_SUBSET_CAP, budget: int | None = None,
                 seed: int = 0) -> ClaimResult:
    n = len(tr.fam2)
    try:
        if n <= cap:
            res = check_haxell_condition(tr.G2, tr.fam2, cap=cap)
        elif budget:
            res = check_haxell_condition(tr.G2, tr.fam2, samples=budget, seed=seed)
        else:
            return skipped(f"{n} parts exceeds the cap {cap} and no sampling budget was given")
    except SearchLimitExceeded as exc:
        return skipped(str(exc))
    detail = {"condition": res.verdict, "subsets": res.checked}
    if res.passed and tr.isr2 is None:
        return ClaimResult("FAIL", {"stage": "isr_augmented"}, detail, res.sampled)
    return ClaimResult("PASS", detail=detail, sampled=res.sampled)


def run_trace_claims(tr: ReductionTrace, selected=CLAIM_IDS, cap: int = DEFAULT_SUBSET_CAP,
                     budget: int | None = None, seed: int = 0) -> dict[str, ClaimResult]:
    checks = {
        "edgedeg": lambda: check_edgedeg(tr),
        "msize": lambda: check_msize(tr),
        "compbound": lambda: check_compbound(tr, cap, budget, seed),
        "totdom": lambda: check_totdom(tr, cap, budget, seed),
        "hprime": lambda: check_hprime(tr.reduced),
        "pathlinked": lambda: check_pathlinked(tr.reduced),
        "combine_ab": lambda: check_combine_ab(tr),
        "isr4": lambda: check_isr4(tr),
        "domISR": lambda: check_domisr(tr, cap, budget, seed),
    }
    return {cid: checks[cid]() if cid in selected else skipped("not selected") for cid in CLAIM_IDS}


def run_reduced_claims(red: ReducedInstance, selected=CLAIM_IDS) -> dict[str, ClaimResult]:
    out = {}
    for cid in CLAIM_IDS:
        if cid not in selected:
            out[cid] = skipped("not selected")
        elif cid == "hprime":
            out[cid] = check_hprime(red)
        elif cid == "pathlinked":
            out[cid] = check_pathlinked(red)
        else:
            out[cid] = skipped("needs an order-4 instance")
    return out
