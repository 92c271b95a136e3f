"""Rational functions, reduced divisors, linear equivalence and rank on metric graphs.

All reductions run on the uniform subdivision of the finite part, where
Dhar's burning algorithm applies verbatim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .chipfiring import RankEngine, reduce_vector
from .metric_graph import (
    Divisor, Edge, GraphError, MetricGraph, Point, Refinement, Vertex,
    refine_at, uniform_subdivision,
)

POS_INF = "+inf"
NEG_INF = "-inf"


@dataclass(frozen=True)
class RationalFunction:
    """Piecewise linear function, linear on every edge of ``graph``.

    ``values`` covers the finite vertices; ``leg_slopes`` gives the slope on
    each infinite edge, measured leaving its finite end (default 0).
    """

    graph: MetricGraph
    values: Mapping[str, Fraction]
    leg_slopes: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        vals = {k: Fraction(v) for k, v in self.values.items()}
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "leg_slopes", {k: int(v) for k, v in self.leg_slopes.items()})
        for v in self.graph.finite_vertices:
            if v not in vals:
                raise GraphError(f"function has no value at vertex {v!r}")
        for e in self.graph.finite_edges:
            s = (vals[e.head] - vals[e.tail]) / e.length
            if s.denominator != 1:
                raise GraphError(f"non-integer slope {s} on edge {e.id!r}")

    def slope(self, edge: str) -> int:
        """Slope along ``edge`` leaving its tail."""
        e = self.graph.edge[edge]
        if e.is_infinite:
            return self.leg_slopes.get(edge, 0)
        return int((self.values[e.head] - self.values[e.tail]) / e.length)

    def value_at_vertex(self, v: str):
        if v in self.values:
            return self.values[v]
        (e,) = self.graph.incidence[v]
        s = self.slope(e.id)
        if s > 0:
            return POS_INF
        if s < 0:
            return NEG_INF
        return self.values[e.tail]

    def __call__(self, p: Point):
        if p.vertex is not None:
            return self.value_at_vertex(p.vertex)
        e = self.graph.edge[p.edge]
        return self.values[e.tail] + self.slope(e.id) * p.offset

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return self._combine(other, 1)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self._combine(other, -1)

    def _combine(self, other, sign):
        if self.graph != other.graph:
            raise GraphError("functions live on different models")
        vals = {v: self.values[v] + sign * other.values[v] for v in self.values}
        legs = {e: self.leg_slopes.get(e, 0) + sign * other.leg_slopes.get(e, 0)
                for e in set(self.leg_slopes) | set(other.leg_slopes)}
        return RationalFunction(self.graph, vals, legs)

    @classmethod
    def constant(cls, g: MetricGraph, c=0) -> "RationalFunction":
        return cls(g, {v: Fraction(c) for v in g.finite_vertices})


def principal_divisor(f: RationalFunction) -> Divisor:
    """Sum of outgoing slopes at each vertex (infinite vertices included)."""
    g = f.graph
    coeff: dict[Point, int] = {}
    for e in g.edges:
        s = f.slope(e.id)
        if s == 0:
            continue
        coeff[Point.at(e.tail)] = coeff.get(Point.at(e.tail), 0) + s
        coeff[Point.at(e.head)] = coeff.get(Point.at(e.head), 0) - s
    return Divisor(coeff)


def default_base(g: MetricGraph) -> Point:
    return Point.at(min(g.finite_vertices))


def _check_finite_support(g: MetricGraph, D: Divisor) -> Divisor:
    D = g.normalize_divisor(D)
    for p in D:
        if p.vertex is not None and g.vertex[p.vertex].infinite:
            raise GraphError(f"divisor supported on infinite point {p}")
        if p.vertex is None and g.edge[p.edge].is_infinite:
            raise GraphError(f"divisor supported on infinite edge {p.edge!r}")
    return D


def retract_legs(g: MetricGraph, D: Divisor) -> Divisor:
    """Move chips on infinite legs to the finite end; each such move is a linear equivalence."""
    D = g.normalize_divisor(D)
    return Divisor((Point.at(g.edge[p.edge].tail) if p.vertex is None and g.edge[p.edge].is_infinite else p, c)
                   for p, c in D.items())


def _function_from_lattice(g: MetricGraph, sub, h: list[Fraction]) -> tuple[RationalFunction, Refinement]:
    """Turn lattice values into a function on g refined at its breakpoints."""
    n = sub.scale
    breaks: list[Point] = []
    for e in sub.graph.edges:
        k = int(e.length * n)
        chain = [sub.index[Point.at(e.tail)]]
        chain += [sub.index[Point.on(e.id, Fraction(j, n))] for j in range(1, k)]
        chain.append(sub.index[Point.at(e.head)])
        for j in range(1, k):
            a, b, c = h[chain[j - 1]], h[chain[j]], h[chain[j + 1]]
            if b - a != c - b:
                breaks.append(Point.on(e.id, Fraction(j, n)))
    ref = refine_at(g, breaks)
    vals = {}
    for v in ref.graph.finite_vertices:
        p = ref.restore(Point.at(v))
        vals[v] = h[sub.index[p]]
    return RationalFunction(ref.graph, vals), ref


@dataclass(frozen=True)
class Reduction:
    reduced: Divisor
    function: RationalFunction  # D + div(function) = reduced, on refinement.graph
    base: Point
    refinement: Refinement


def reduction(g: MetricGraph, D: Divisor, q: Point | None = None) -> Reduction:
    D = _check_finite_support(g, D)
    q = g.normalize(q) if q is not None else default_base(g)
    sub = uniform_subdivision(g, list(D) + [q])
    vec, script = reduce_vector(sub.adjacency, sub.to_vector(D), sub.lattice_index(q))
    h = [Fraction(s, sub.scale) for s in script]
    f, ref = _function_from_lattice(g, sub, h)
    return Reduction(sub.to_divisor(vec), f, q, ref)


def reduce_divisor(g: MetricGraph, D: Divisor, q: Point | None = None) -> Divisor:
    """The q-reduced divisor linearly equivalent to D."""
    return reduction(g, D, q).reduced


def is_linearly_equivalent(g: MetricGraph, D1: Divisor, D2: Divisor) -> bool:
    if D1.degree != D2.degree:
        return False
    return reduce_divisor(g, D1 - D2) == Divisor()


def equivalence_witness(g: MetricGraph, D1: Divisor, D2: Divisor) -> RationalFunction | None:
    """A function f with D1 + div(f) = D2, or None when D1 and D2 are not equivalent."""
    if D1.degree != D2.degree:
        return None
    red = reduction(g, D1 - D2)
    if red.reduced != Divisor():
        return None
    return red.function


def pull_function(f: RationalFunction, ref: Refinement) -> RationalFunction:
    """Express f on a refinement of its model."""
    vals = {v: f(ref.restore(Point.at(v))) for v in ref.graph.finite_vertices}
    legs = {}
    for old, segs in ref.pieces.items():
        if f.graph.edge[old].is_infinite:
            legs[segs[-1][0]] = f.slope(old)
    return RationalFunction(ref.graph, vals, legs)


@dataclass(frozen=True)
class RankResult:
    rank: int
    witness: Divisor  # effective, degree rank+1, with |D - witness| empty


def _engine(g: MetricGraph, D: Divisor, all_lattice: bool, budget: int | None):
    D = _check_finite_support(g, retract_legs(g, D))
    q = default_base(g)
    sub = uniform_subdivision(g, list(D))
    if all_lattice:
        cand = range(sub.n)
    else:
        cand = sorted(set(sub.model_indices) | {sub.lattice_index(p) for p in D})
    eng = RankEngine(sub.adjacency, sub.lattice_index(q), cand, budget)
    return sub, eng, D


def rank(g: MetricGraph, D: Divisor, budget: int | None = None) -> RankResult:
    """Rank of D, searching effective divisors on model vertices and supp(D)."""
    sub, eng, D = _engine(g, D, False, budget)
    r, w = eng.rank(sub.to_vector(D))
    return RankResult(r, Divisor.of(*(sub.points[i] for i in w)))


def subdivided_rank(g: MetricGraph, D: Divisor, budget: int | None = None) -> RankResult:
    """Rank of D as a divisor on the uniform subdivision viewed as a finite graph."""
    sub, eng, D = _engine(g, D, True, budget)
    r, w = eng.rank(sub.to_vector(D))
    return RankResult(r, Divisor.of(*(sub.points[i] for i in w)))


def virtual_loop_graph(g: MetricGraph, loop_length=1) -> MetricGraph:
    """Γ^#: replace vertex genus by that many attached loops."""
    vs = tuple(Vertex(v.id, 0, v.infinite) for v in g.vertices)
    es = list(g.edges)
    taken = set(g.edge)
    for v in g.vertices:
        for k in range(v.genus):
            eid = f"{v.id}~loop{k}"
            while eid in taken:
                eid += "'"
            taken.add(eid)
            es.append(Edge(eid, v.id, v.id, Fraction(loop_length)))
    return MetricGraph(vs, tuple(es))


def weighted_rank(g: MetricGraph, D: Divisor, loop_length=1, budget: int | None = None) -> int:
    return rank(virtual_loop_graph(g, loop_length), D, budget).rank


# ---------------------------------------------------------------------------
# wedge sums


@dataclass(frozen=True)
class WedgeRank:
    rank: int
    eta: Mapping[int, int]
    first: MetricGraph
    second: MetricGraph
    first_divisor: Divisor
    second_divisor: Divisor


def split_at(g: MetricGraph, t: str, side: str | None = None) -> tuple[MetricGraph, MetricGraph]:
    """Split g at the cut vertex t into (Γ1, Γ2), both containing t.

    Γ1 is the component of g - t containing ``side`` (default: the smallest
    vertex id other than t); Γ2 is everything else.
    """
    others = [v for v in g.vertex if v != t]
    rest = [e for e in g.edges if t not in (e.tail, e.head)]
    comps = g.components(others, rest)
    # loops at t form their own pieces; attach them to Γ2
    if len(comps) < 2 and not any(e.is_loop and e.tail == t for e in g.edges):
        raise GraphError(f"{t!r} is not a cut vertex")
    if side is None:
        side = min(others)
    first = next(c for c in comps if side in c)
    v1 = first | {t}
    e1 = [e for e in g.edges if e.tail in first or e.head in first]
    e2 = [e for e in g.edges if e not in e1]
    v2 = {t} | {x for e in e2 for x in (e.tail, e.head)}
    if not e2:
        raise GraphError(f"{t!r} is not a cut vertex")
    g1 = MetricGraph(tuple(v for v in g.vertices if v.id in v1), tuple(e1))
    g2 = MetricGraph(tuple(v for v in g.vertices if v.id in v2), tuple(e2))
    return g1, g2


def eta_table(g1: MetricGraph, D1: Divisor, t: str, m_max: int, budget: int | None = None) -> dict[int, int]:
    """η(m) = least h with r(D1 + h(t)) = m, for 0 <= m <= m_max."""
    tp = Point.at(t)
    h = -D1.degree
    table: dict[int, int] = {}
    r = rank(g1, D1 + h * Divisor.of(tp), budget).rank
    while r < 0:
        h += 1
        r = rank(g1, D1 + h * Divisor.of(tp), budget).rank
    m = 0
    while m <= m_max:
        while r < m:
            h += 1
            r = rank(g1, D1 + h * Divisor.of(tp), budget).rank
        table[m] = h
        m += 1
    return table


def wedge_rank(g: MetricGraph, D: Divisor, t: Point, side: str | None = None,
               budget: int | None = None) -> WedgeRank:
    """Rank via the wedge-sum formula min_m { m + r_2(D2 - η(m)(t)) }."""
    D = _check_finite_support(g, D)
    ref = refine_at(g, [t])
    tv = ref.relocate(t).vertex
    if tv is None:
        raise GraphError("cut point must be a vertex")
    h = ref.graph
    D = ref.relocate_divisor(D)
    g1, g2 = split_at(h, tv, side)
    D1 = Divisor({p: c for p, c in D.items() if _on(g1, p)})
    D2 = D - D1
    m_max = max(D.degree, 0) + 1
    eta = eta_table(g1, D1, tv, m_max, budget)
    tp = Divisor.of(Point.at(tv))
    best = min(m + rank(g2, D2 - eta[m] * tp, budget).rank for m in range(m_max + 1))
    return WedgeRank(max(best, -1), eta, g1, g2, D1, D2)


def _on(g: MetricGraph, p: Point) -> bool:
    return p.vertex in g.vertex if p.vertex is not None else p.edge in g.edge


# ---------------------------------------------------------------------------
# direct metric Dhar (cross-check)


def metric_reduce(g: MetricGraph, D: Divisor, q: Point | None = None, max_steps: int = 100000) -> Divisor:
    """q-reduced divisor by burning directly on the metric graph.

    Requires D effective away from q.  Chips stay at vertices of a model
    that is refined whenever a firing moves chips into edge interiors.
    """
    D = _check_finite_support(g, D)
    q = g.normalize(q) if q is not None else default_base(g)
    if any(c < 0 for p, c in D.items() if p != q):
        raise GraphError("metric_reduce needs D effective away from q")
    base = g.finite_part()
    refs: list[Refinement] = []
    ref = refine_at(base, list(D) + [q])
    refs.append(ref)
    h = ref.graph
    chips = {p.vertex: c for p, c in ref.relocate_divisor(D).items()}
    qv = ref.relocate(q).vertex
    for _ in range(max_steps):
        burnt = {qv}
        hits: dict[str, int] = {}
        todo = [qv]
        while todo:
            v = todo.pop()
            for e in h.incidence[v]:
                for w in ([e.head] if e.tail == v else []) + ([e.tail] if e.head == v else []):
                    if w in burnt:
                        continue
                    hits[w] = hits.get(w, 0) + 1
                    if hits[w] > chips.get(w, 0):
                        burnt.add(w)
                        todo.append(w)
        unburnt = set(h.vertex) - burnt
        if not unburnt:
            break
        out: list[tuple[Edge, str]] = []
        for e in h.edges:
            if e.tail in unburnt and e.head not in unburnt:
                out.append((e, e.tail))
            elif e.head in unburnt and e.tail not in unburnt:
                out.append((e, e.head))
        eps = min(e.length for e, _ in out)
        moved: list[Point] = []
        for e, u in out:
            chips[u] -= 1
            if eps == e.length:
                moved.append(Point.at(e.other(u)))
            else:
                moved.append(Point.on(e.id, eps if e.tail == u else e.length - eps))
        ref = refine_at(h, moved)
        refs.append(ref)
        chips = {v: c for v, c in chips.items()}
        for p in moved:
            v = ref.relocate(p).vertex
            chips[v] = chips.get(v, 0) + 1
        h = ref.graph
    else:
        raise GraphError("metric burning did not terminate within max_steps")
    result = Divisor({Point.at(v): c for v, c in chips.items()})
    for r in reversed(refs):
        result = Divisor((r.restore(p), c) for p, c in result.items())
    return g.normalize_divisor(result)
