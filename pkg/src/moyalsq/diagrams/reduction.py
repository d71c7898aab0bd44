"""Mechanical finiteness certificate for weighted contraction graphs.

A graph stands for ``sum over vertex indices of prod_edges A_uv^-w prod_loops A_vv^-s``.
The rules below replace the sum over one vertex by a power bound, each under
explicit hypotheses on the exponents (``a``, ``b`` are the two exponents met at
the summed vertex, ``delta`` the slack):

* rule 1, case 1: plain vertex with two edges, ``a, b in (0,1)``, ``a+b > 1`` -> edge ``a+b-1``
* rule 1, case 2: plain vertex with two edges, ``a >= 1`` or ``b >= 1`` (both positive) -> edge ``min(a,b) - delta``
* rule 2, case 3: self-weight ``a`` and one edge ``b``, ``a, b > 0``, ``a+b > 1``, ``a < 1`` -> self-weight ``a+b-1`` on the neighbour
* rule 2, case 4: self-weight ``a >= 1`` and one edge ``b > 0`` -> self-weight ``b - delta`` on the neighbour
* rule 3, case 5: plain vertex with one edge ``a > 1`` -> self-weight ``a-1`` on the neighbour
* rule 4, case 6: self-weight ``a in (0,1)`` and two edges of weight at least 1 -> edge of weight 1
* rule 5, case 7: isolated pair joined by one edge ``a > 1`` -> self-weight ``a-1``
* rule 5, case 8: isolated vertex with self-weight ``a > 1`` -> finite constant

Because every ``A >= 1``, lowering an exponent only enlarges the sum, so the
search may also drop an edge or a self-weight of positive exponent.
Exponents are exact rationals; float inputs are read through their decimal repr.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .graph import DiagramGraph

Num = Fraction


def exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class Step:
    rule: int  # 1..5 for rules, 0 for a weakening move
    case: int  # 1..8, 0 for weakening
    vertex: int
    targets: tuple[int, ...]
    inputs: tuple[Fraction, ...]
    output: Fraction | None
    note: str = ""

    def text(self, names: dict[int, str] | None = None) -> str:
        nm = (lambda v: names.get(v, str(v))) if names else str
        ins = ", ".join(str(x) for x in self.inputs)
        out = "-" if self.output is None else str(self.output)
        tg = ",".join(nm(t) for t in self.targets)
        if self.rule == 0:
            return f"weaken  at {nm(self.vertex)} [{tg}] drop {ins}  {self.note}".rstrip()
        return f"rule {self.rule} ({self.case}) at {nm(self.vertex)} -> [{tg}] in ({ins}) out {out}  {self.note}".rstrip()


@dataclass
class ReductionTrace:
    steps: list[Step]
    outcome: str  # "finite" or "stuck"
    alpha: Fraction
    beta: Fraction
    delta: Fraction
    final_exponent: Fraction | None = None  # smallest self-weight consumed by case 8
    remaining: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return self.outcome == "finite"

    def rules_used(self) -> list[tuple[int, int]]:
        return [(s.rule, s.case) for s in self.steps]


class _State:
    """Mutable weighted graph; edges keyed by ``frozenset({u, v})``."""

    __slots__ = ("verts", "edges", "loops")

    def __init__(self, verts, edges, loops):
        self.verts = set(verts)
        self.edges = dict(edges)
        self.loops = dict(loops)

    def copy(self) -> "_State":
        return _State(self.verts, self.edges, self.loops)

    def key(self):
        return (frozenset(self.verts), frozenset(self.edges.items()), frozenset(self.loops.items()))

    def incident(self, v: int) -> list[tuple[int, Fraction]]:
        out = []
        for e, w in self.edges.items():
            if v in e:
                (u,) = e - {v}
                out.append((u, w))
        return sorted(out)

    def loop(self, v: int) -> Fraction:
        return self.loops.get(v, Fraction(0))

    def add_edge(self, u: int, v: int, w: Fraction) -> None:
        e = frozenset((u, v))
        tot = self.edges.get(e, Fraction(0)) + w
        if tot == 0:
            self.edges.pop(e, None)
        else:
            self.edges[e] = tot

    def add_loop(self, v: int, w: Fraction) -> None:
        tot = self.loops.get(v, Fraction(0)) + w
        if tot == 0:
            self.loops.pop(v, None)
        else:
            self.loops[v] = tot

    def remove(self, v: int) -> None:
        self.verts.discard(v)
        self.loops.pop(v, None)
        for e in [e for e in self.edges if v in e]:
            del self.edges[e]

    def describe(self) -> str:
        es = ", ".join(f"{min(e)}-{max(e)}:{w}" for e, w in sorted(self.edges.items(), key=lambda x: sorted(x[0])))
        ls = ", ".join(f"{v}:{w}" for v, w in sorted(self.loops.items()))
        return f"vertices {sorted(self.verts)}; edges [{es}]; self [{ls}]"


def _rule_moves(s: _State, delta: Fraction) -> list[tuple[int, Step]]:
    """Applicable rule steps with their priority (lower first)."""
    moves: list[tuple[int, Step]] = []
    one = Fraction(1)
    for v in sorted(s.verts):
        inc = s.incident(v)
        lp = s.loop(v)
        if len(inc) == 2 and lp == 0:
            (u1, a), (u2, b) = inc
            if 0 < a < 1 and 0 < b < 1 and a + b > 1:
                moves.append((0, Step(1, 1, v, (u1, u2), (a, b), a + b - 1)))
            elif (a >= 1 or b >= 1) and a > 0 and b > 0:
                moves.append((0, Step(1, 2, v, (u1, u2), (a, b), min(a, b) - delta)))
        if len(inc) == 2 and 0 < lp < 1:
            (u1, a), (u2, b) = inc
            if a >= 1 and b >= 1:
                note = "edges weakened to 1" if (a > 1 or b > 1) else ""
                moves.append((1, Step(4, 6, v, (u1, u2), (lp, a, b), one, note)))
        if len(inc) == 1 and lp != 0:
            ((u, b),) = inc
            a = lp
            if a > 0 and b > 0 and a + b > 1 and a < 1:
                moves.append((2, Step(2, 3, v, (u,), (a, b), a + b - 1)))
            elif b > 0 and a >= 1:
                moves.append((2, Step(2, 4, v, (u,), (a, b), b - delta)))
        if len(inc) == 1 and lp == 0:
            ((u, a),) = inc
            if a > 1:
                pair = len(s.incident(u)) == 1 and s.loop(u) == 0
                if pair:
                    moves.append((3, Step(5, 7, v, (u,), (a,), a - 1)))
                else:
                    moves.append((2, Step(3, 5, v, (u,), (a,), a - 1)))
        if not inc and lp > 1:
            moves.append((3, Step(5, 8, v, (), (lp,), None)))
    moves.sort(key=lambda m: (m[0], m[1].vertex))
    return moves


def _weaken_moves(s: _State) -> list[Step]:
    out = []
    for e, w in sorted(s.edges.items(), key=lambda x: sorted(x[0])):
        if w > 0:
            u, v = sorted(e)
            out.append(Step(0, 0, u, (v,), (w,), None, "edge bounded by 1"))
    for v, w in sorted(s.loops.items()):
        if w > 0:
            out.append(Step(0, 0, v, (), (w,), None, "self-weight bounded by 1"))
    return out


def _apply(s: _State, st: Step) -> _State:
    t = s.copy()
    if st.rule == 0:
        if st.targets:
            e = frozenset((st.vertex, st.targets[0]))
            del t.edges[e]
        else:
            del t.loops[st.vertex]
        return t
    t.remove(st.vertex)
    if st.case in (1, 2, 6):
        t.add_edge(st.targets[0], st.targets[1], st.output)
    elif st.case in (3, 4, 5, 7):
        t.add_loop(st.targets[0], st.output)
    return t


def _check_step(s: _State, st: Step, delta: Fraction) -> bool:
    """Re-derive ``st`` from the graph state and confirm its hypotheses and output."""
    if st.rule == 0:
        return any(m == st for m in _weaken_moves(s))
    return any(m == st for _, m in _rule_moves(s, delta))


def _initial(g: DiagramGraph, alpha: Fraction, beta: Fraction) -> _State:
    edges, loops = g.numeric(alpha, beta)
    edges = {e: w for e, w in edges.items() if w != 0}
    loops = {v: w for v, w in loops.items() if w != 0}
    return _State(range(g.n_vertices), edges, loops)


def _greedy(s: _State, delta: Fraction) -> tuple[list[Step], _State]:
    steps = []
    while s.verts:
        moves = _rule_moves(s, delta)
        if not moves:
            break
        st = moves[0][1]
        steps.append(st)
        s = _apply(s, st)
    return steps, s


def _search(s: _State, delta: Fraction, budget: int, seen: set) -> list[Step] | None:
    if not s.verts:
        return []
    k = (s.key(), budget)
    if k in seen:
        return None
    seen.add(k)
    for _, st in _rule_moves(s, delta):
        rest = _search(_apply(s, st), delta, budget, seen)
        if rest is not None:
            return [st] + rest
    if budget > 0:
        for st in _weaken_moves(s):
            rest = _search(_apply(s, st), delta, budget - 1, seen)
            if rest is not None:
                return [st] + rest
    return None


def _finish(steps: list[Step], end: _State, alpha, beta, delta) -> ReductionTrace:
    finals = [st.inputs[0] for st in steps if st.case == 8]
    if end.verts:
        return ReductionTrace(steps, "stuck", alpha, beta, delta, None, end.describe())
    return ReductionTrace(steps, "finite", alpha, beta, delta, min(finals) if finals else None)


def reduce(g: DiagramGraph, alpha, beta, delta, *, max_weakenings: int = 8) -> ReductionTrace:
    """Reduce ``g`` to a constant, or report where no rule applies.

    The fixed strategy prefers rule 1, then rule 4, then rules 2 and 3, then
    rule 5, smallest vertex id first. If it gets stuck a depth-first search over
    all rule orders plus at most ``max_weakenings`` weakening moves is tried.
    """
    alpha, beta, delta = exact(alpha), exact(beta), exact(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    start = _initial(g, alpha, beta)
    steps, end = _greedy(start, delta)
    if not end.verts:
        return _finish(steps, end, alpha, beta, delta)
    found = _search(start, delta, max_weakenings, set())
    if found is not None:
        tr = _finish(found, _State((), {}, {}), alpha, beta, delta)
        tr.notes.append("fixed strategy stuck; reduced after search")
        return tr
    tr = _finish(steps, end, alpha, beta, delta)
    tr.notes.append("no rule sequence with the allowed weakenings reduces this graph")
    return tr


def verify_trace(g: DiagramGraph, trace: ReductionTrace) -> bool:
    """Replay ``trace`` on ``g``, re-checking every hypothesis; True iff it certifies finiteness."""
    if not trace.finite:
        return False
    s = _initial(g, trace.alpha, trace.beta)
    for st in trace.steps:
        if not _check_step(s, st, trace.delta):
            return False
        s = _apply(s, st)
    return not s.verts
