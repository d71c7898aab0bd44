"""Weighted contraction graphs and their isomorphism classes.

Contracting ``<z_ab z_cd> = delta_ad delta_bc / A_ab`` merges index ``a`` with
``d`` and ``b`` with ``c`` and leaves a propagator edge ``(a, b)`` of weight 1.
The two alpha edges ``(k,l), (k',l')`` carry weight ``2 alpha`` and the two beta
edges ``(m,n), (m',n')`` weight ``-2 beta``. Parallel edges add; an edge whose
ends merged becomes a self-weight ``A_vv^-w`` on the vertex.

Edge decorations are kept symbolically as counts ``(propagators, alpha, beta)``
so classification does not depend on the numeric exponents.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from .pairings import ALPHA_EDGES, BETA_EDGES, FACTORS, INDEX_ORDER, Pairing, enumerate_pairings, format_pairing

Deco = tuple[int, int, int]
ZERO: Deco = (0, 0, 0)


def _add(a: Deco, b: Deco) -> Deco:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def deco_weight(d: Deco, alpha, beta):
    """Numeric exponent ``p + 2 alpha a - 2 beta b`` of a decoration."""
    return d[0] + 2 * alpha * d[1] - 2 * beta * d[2]


@dataclass(frozen=True)
class DiagramGraph:
    pairing: Pairing
    vertices: tuple[tuple[str, ...], ...]  # merged index names; position = vertex id
    edges: tuple[tuple[int, int, Deco], ...]  # u < v, parallel edges already summed
    loops: tuple[Deco, ...]  # self-decoration per vertex

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def totals(self) -> Deco:
        tot = ZERO
        for _, _, d in self.edges:
            tot = _add(tot, d)
        for d in self.loops:
            tot = _add(tot, d)
        return tot

    def vertex_name(self, v: int) -> str:
        return "=".join(self.vertices[v])

    def numeric(self, alpha, beta) -> tuple[dict[frozenset, object], dict[int, object]]:
        edges = {frozenset((u, v)): deco_weight(d, alpha, beta) for u, v, d in self.edges}
        loops = {i: deco_weight(d, alpha, beta) for i, d in enumerate(self.loops) if d != ZERO}
        return edges, loops


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def pairing_to_graph(p: Pairing) -> DiagramGraph:
    dsu = _DSU(INDEX_ORDER)
    for i, j in p:
        a, b = FACTORS[i - 1]
        c, d = FACTORS[j - 1]
        dsu.union(a, d)
        dsu.union(b, c)
    groups: dict[str, list[str]] = defaultdict(list)
    for name in INDEX_ORDER:
        groups[dsu.find(name)].append(name)
    order = sorted(groups.values(), key=lambda g: INDEX_ORDER.index(g[0]))
    vid = {name: k for k, g in enumerate(order) for name in g}
    acc: dict[tuple[int, int], Deco] = defaultdict(lambda: ZERO)
    loops = [ZERO] * len(order)

    def put(x: str, y: str, d: Deco) -> None:
        u, v = sorted((vid[x], vid[y]))
        if u == v:
            loops[u] = _add(loops[u], d)
        else:
            acc[(u, v)] = _add(acc[(u, v)], d)

    for i, _ in p:
        put(*FACTORS[i - 1], (1, 0, 0))
    for x, y in ALPHA_EDGES:
        put(x, y, (0, 1, 0))
    for x, y in BETA_EDGES:
        put(x, y, (0, 0, 1))
    edges = tuple(sorted((u, v, d) for (u, v), d in acc.items()))
    return DiagramGraph(p, tuple(tuple(g) for g in order), edges, tuple(loops))


def _encode(g: DiagramGraph, perm: tuple[int, ...]) -> tuple:
    inv = {old: new for new, old in enumerate(perm)}
    loops = tuple(g.loops[old] for old in perm)
    edges = tuple(sorted((*sorted((inv[u], inv[v])), d) for u, v, d in g.edges))
    return loops, edges


def canonical_form(g: DiagramGraph) -> tuple:
    """Label-independent encoding; equal forms mean isomorphic decorated graphs.

    Vertices are grouped by an invariant key (self-decoration and sorted incident
    decorations); the minimal encoding over permutations inside each group is
    the canonical one. Graphs have at most 8 vertices, so this stays cheap.
    """
    inc: dict[int, list[Deco]] = defaultdict(list)
    for u, v, d in g.edges:
        inc[u].append(d)
        inc[v].append(d)
    key = {v: (g.loops[v], tuple(sorted(inc[v]))) for v in range(g.n_vertices)}
    groups_by_key: dict[tuple, list[int]] = defaultdict(list)
    for v in range(g.n_vertices):
        groups_by_key[key[v]].append(v)
    ordered_keys = sorted(groups_by_key)
    groups = [groups_by_key[k] for k in ordered_keys]
    best = None
    for combo in itertools.product(*(itertools.permutations(gr) for gr in groups)):
        perm = tuple(v for part in combo for v in part)
        code = _encode(g, perm)
        if best is None or code < best:
            best = code
    return (tuple(k for k in ordered_keys for _ in groups_by_key[k]), best)


@dataclass(frozen=True)
class DiagramClass:
    class_id: int
    members: tuple[Pairing, ...]
    graph: DiagramGraph  # representative (first member)

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    def member_text(self) -> str:
        return " ".join(format_pairing(p) for p in self.members)


def classify(graphs: list[DiagramGraph] | None = None) -> list[DiagramClass]:
    """Group graphs by decorated isomorphism; classes ordered by their first member."""
    if graphs is None:
        graphs = [pairing_to_graph(p) for p in enumerate_pairings()]
    buckets: dict[tuple, list[DiagramGraph]] = {}
    for g in graphs:
        buckets.setdefault(canonical_form(g), []).append(g)
    ordered = sorted(buckets.values(), key=lambda gs: min(x.pairing for x in gs))
    out = []
    for k, gs in enumerate(ordered, start=1):
        gs = sorted(gs, key=lambda x: x.pairing)
        out.append(DiagramClass(k, tuple(x.pairing for x in gs), gs[0]))
    return out


def compare_with_reference(classes: list[DiagramClass], reference) -> dict[str, list]:
    """Differences between computed classes and a reference grouping (empty lists mean agreement)."""
    computed = {frozenset(c.members) for c in classes}
    ref = {frozenset(gr) for gr in reference}
    fmt = lambda groups: sorted(" ".join(format_pairing(p) for p in sorted(gr)) for gr in groups)
    return {"only_computed": fmt(computed - ref), "only_reference": fmt(ref - computed)}
