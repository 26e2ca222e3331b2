"""Exact k-colouring decision, colour lifting and colouring checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph_core import Graph, canonical, edge_key, iter_bits

DEFAULT_CAPS = {3: 40, 4: 32}
LIFTED_COLOUR = 3


class ColoringError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Coloring:
    assignment: dict
    k: int

    def classes(self) -> list[list[str]]:
        out = [[] for _ in range(self.k)]
        for v in canonical(self.assignment):
            out[self.assignment[v]].append(v)
        return out


def chromatic_decision(g: Graph, k: int, cap: int | None = None) -> Coloring | None:
    """Find a proper k-colouring of ``g`` or prove that none exists.

    Vertices are coloured most-constrained first (fewest colours left, then
    most uncoloured neighbours, then canonical order).  A vertex may only open
    the next unused colour, which fixes the first vertex to colour 0 and its
    first coloured neighbour to colour 1.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if cap is None:
        cap = DEFAULT_CAPS.get(k)
    n = len(g)
    if cap is not None and n > cap:
        raise CapExceeded(f"{n} vertices exceeds the {k}-colouring cap {cap}")
    if n == 0:
        return Coloring({}, k)
    masks = g.masks
    full = (1 << k) - 1
    colour = [-1] * n
    # domain[v]: bitmask of colours still allowed
    domain = [full] * n

    def pick(uncoloured: int) -> int:
        best, best_key = -1, None
        for v in iter_bits(uncoloured):
            key = (domain[v].bit_count(), -(masks[v] & uncoloured).bit_count(), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def go(uncoloured: int, used: int) -> bool:
        if not uncoloured:
            return True
        v = pick(uncoloured)
        rest = uncoloured & ~(1 << v)
        limit = min(used + 1, k)
        for c in range(limit):
            if not domain[v] >> c & 1:
                continue
            bit = 1 << c
            touched = []
            dead = False
            for w in iter_bits(masks[v] & rest):
                if domain[w] & bit:
                    domain[w] &= ~bit
                    touched.append(w)
                    if not domain[w]:
                        dead = True
                        break
            if not dead:
                colour[v] = c
                if go(rest, max(used, c + 1)):
                    return True
                colour[v] = -1
            for w in touched:
                domain[w] |= bit
        return False

    if not go((1 << n) - 1, 0):
        return None
    return Coloring({g.vertices[i]: colour[i] for i in range(n)}, k)


@dataclass(frozen=True)
class ColoringCheck:
    ok: bool
    witness: tuple | None = None
    reason: str = ""


def verify_coloring(g: Graph, c: Coloring) -> ColoringCheck:
    for v in g.vertices:
        if v not in c.assignment:
            return ColoringCheck(False, (v,), "uncoloured vertex")
        if not 0 <= c.assignment[v] < c.k:
            return ColoringCheck(False, (v,), "colour outside the palette")
    for u, v in g.edges():
        if c.assignment[u] == c.assignment[v]:
            return ColoringCheck(False, (u, v), "monochromatic edge")
    return ColoringCheck(True)


def lift_coloring(g: Graph, R: Iterable[str], c3: Coloring) -> Coloring:
    """Extend a 3-colouring of g - R to a 4-colouring of g by giving R colour 3."""
    R = set(R)
    if not g.is_independent(R):
        bad = next(edge_key(u, w) for u in canonical(R) for w in canonical(g.neighbors(u) & R))
        raise ColoringError(f"R is not independent: edge {bad}")
    rest = g.remove_vertices(R)
    check = verify_coloring(rest, c3)
    if c3.k > 3 or not check.ok:
        raise ColoringError(f"not a proper 3-colouring of g - R: {check.reason or 'palette too large'} {check.witness or ''}")
    assignment = {v: c3.assignment[v] for v in rest.vertices}
    assignment.update({v: LIFTED_COLOUR for v in R})
    return Coloring(assignment, 4)
