"""Automorphisms, quotients and hyperelliptic involutions of metric graphs."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterator, Mapping, Sequence

from .chipfiring import BudgetExceeded
from .divisor_theory import weighted_rank
from .harmonic import EdgeImage, HarmonicMorphism
from .metric_graph import INF, Divisor, Edge, GraphError, MetricGraph, Point, Refinement, Vertex, minimize, refine_at

DEFAULT_GROUP_BUDGET = 200_000


@dataclass(frozen=True)
class GraphAutomorphism:
    """Vertex permutation plus, per edge, its image edge and whether it is traversed backwards."""

    vertex_perm: Mapping[str, str]
    edge_perm: Mapping[str, tuple[str, bool]]

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.vertex_perm.items())), tuple(sorted(self.edge_perm.items()))))

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in self.vertex_perm.items()) and \
            all(img == (e, False) for e, img in self.edge_perm.items())

    def then(self, other: "GraphAutomorphism") -> "GraphAutomorphism":
        """Apply self, then other."""
        vp = {v: other.vertex_perm[w] for v, w in self.vertex_perm.items()}
        ep = {}
        for e, (f, r) in self.edge_perm.items():
            h, r2 = other.edge_perm[f]
            ep[e] = (h, r != r2)
        return GraphAutomorphism(vp, ep)

    def apply(self, g: MetricGraph, p: Point) -> Point:
        if p.vertex is not None:
            return Point.at(self.vertex_perm[p.vertex])
        f, rev = self.edge_perm[p.edge]
        t = g.edge[f].length - p.offset if rev else p.offset
        return g.point(f, t)

    def fixes_direction(self, e: str, sign: int) -> bool:
        f, rev = self.edge_perm[e]
        return f == e and not rev


def identity(g: MetricGraph) -> GraphAutomorphism:
    return GraphAutomorphism({v.id: v.id for v in g.vertices}, {e.id: (e.id, False) for e in g.edges})


# ---------------------------------------------------------------------------
# enumeration


def _between(g: MetricGraph) -> dict[frozenset, Counter]:
    out: dict[frozenset, Counter] = defaultdict(Counter)
    for e in g.edges:
        out[frozenset((e.tail, e.head))][e.length] += 1
    return out


def _signature(g: MetricGraph, v: str):
    loops = sorted((e.length for e in g.incidence[v] if e.is_loop), key=str)
    others = sorted((e.length for e in g.incidence[v] if not e.is_loop), key=str)
    vx = g.vertex[v]
    return (vx.genus, vx.infinite, len(loops), tuple(map(str, loops)), tuple(map(str, others)))


def _order(g: MetricGraph) -> list[str]:
    seen: list[str] = []
    for start in sorted(g.vertex):
        if start in seen:
            continue
        todo = [start]
        while todo:
            v = todo.pop(0)
            if v in seen:
                continue
            seen.append(v)
            todo += sorted(g.neighbours(v))
    return seen


def _vertex_maps(g: MetricGraph, fixed: frozenset = frozenset(), involution: bool = False) -> Iterator[dict]:
    order = _order(g)
    sig = {v: _signature(g, v) for v in order}
    between = _between(g)
    sigma: dict[str, str] = {}
    used: set[str] = set()

    def ok(v: str, w: str) -> bool:
        if sig[v] != sig[w] or (v in fixed and w != v):
            return False
        if involution and w in sigma and sigma[w] != v:
            return False
        for u, x in sigma.items():
            if between.get(frozenset((v, u)), Counter()) != between.get(frozenset((w, x)), Counter()):
                return False
        return True

    def rec(i: int):
        if i == len(order):
            if involution and any(sigma[sigma[v]] != v for v in sigma):
                return
            yield dict(sigma)
            return
        v = order[i]
        for w in order:
            if w in used or not ok(v, w):
                continue
            sigma[v] = w
            used.add(w)
            yield from rec(i + 1)
            del sigma[v]
            used.discard(w)

    yield from rec(0)


def _edge_maps(g: MetricGraph, sigma: Mapping[str, str], pinned: Mapping[str, tuple[str, bool]]) -> Iterator[dict]:
    buckets: dict[tuple, list[Edge]] = defaultdict(list)
    for e in g.edges:
        buckets[(frozenset((e.tail, e.head)), e.length)].append(e)
    choices = []
    for (ends, ln), es in buckets.items():
        img_ends = frozenset(sigma[x] for x in ends)
        targets = buckets[(img_ends, ln)]
        options = []
        for perm in permutations(targets):
            loops = [e for e in es if e.is_loop]
            for flips in product((False, True), repeat=len(loops)):
                flip = dict(zip((e.id for e in loops), flips))
                m = {}
                good = True
                for e, f in zip(es, perm):
                    rev = flip[e.id] if e.is_loop else sigma[e.tail] != f.tail
                    if e.id in pinned and pinned[e.id] != (f.id, rev):
                        good = False
                        break
                    m[e.id] = (f.id, rev)
                if good:
                    options.append(m)
        choices.append(options)
    for combo in product(*choices):
        out = {}
        for part in combo:
            out.update(part)
        yield out


def _search(g: MetricGraph, fixed=frozenset(), pinned=None, involution=False,
            budget: int | None = DEFAULT_GROUP_BUDGET) -> Iterator[GraphAutomorphism]:
    pinned = pinned or {}
    n = 0
    for sigma in _vertex_maps(g, frozenset(fixed), involution):
        for em in _edge_maps(g, sigma, pinned):
            a = GraphAutomorphism(sigma, em)
            if involution and not a.then(a).is_identity:
                continue
            n += 1
            if budget is not None and n > budget:
                raise BudgetExceeded(f"automorphism search exceeded {budget} elements")
            yield a


def automorphisms(g: MetricGraph, budget: int | None = DEFAULT_GROUP_BUDGET) -> list[GraphAutomorphism]:
    """All automorphisms preserving lengths and genera.

    Loops carry a free flip (reflection through their midpoint), which is what
    the midpoint-subdivided model sees as swapping the two halves.
    """
    return list(_search(g, budget=budget))


def fixed_midpoints(g: MetricGraph, H: Sequence[GraphAutomorphism]) -> dict[Point, tuple[int, int]]:
    """Midpoints of edges flipped by some element, with |H_w| and the order of its unflipped part."""
    out = {}
    for e in g.edges:
        if e.is_infinite or not any(h.edge_perm[e.id] == (e.id, True) for h in H):
            continue
        stab = [h for h in H if h.edge_perm[e.id][0] == e.id]
        keep = [h for h in stab if not h.edge_perm[e.id][1]]
        out[g.point(e.id, e.length / 2)] = (len(stab), len(keep))
    return out


# ---------------------------------------------------------------------------
# quotients


def lift_action(ref: Refinement, h: GraphAutomorphism) -> GraphAutomorphism:
    """The action of h on a refinement at an h-invariant point set."""
    g, G = ref.original, ref.graph
    vp = {v: ref.relocate(h.apply(g, ref.restore(Point.at(v)))).vertex for v in G.vertex}
    ep = {}
    for e, pieces in ref.pieces.items():
        f, rev = h.edge_perm[e]
        ln = g.edge[f].length
        for pid, a, b in pieces:
            lo, hi = (ln - b, ln - a) if rev and b is not INF else (a, b)
            match = [q for q, x, y in ref.pieces[f] if x == lo and y == hi]
            if len(match) != 1:
                raise GraphError(f"refinement is not invariant under the action on {e!r}")
            ep[pid] = (match[0], rev)
    return GraphAutomorphism(vp, ep)


@dataclass(frozen=True)
class Quotient:
    graph: MetricGraph
    projection: HarmonicMorphism
    refinement: Refinement
    order: int


def quotient(g: MetricGraph, H: Sequence[GraphAutomorphism], char: int = 0) -> Quotient:
    """Quotient by H, given as its list of elements; edge lengths are multiplied by |H_e|.

    An element may act trivially on the graph (as the hyperelliptic involution
    does on a tree of positive-genus vertices); it still counts towards |H|.
    """
    if not H:
        raise GraphError("empty group")
    W = fixed_midpoints(g, H)
    ref = refine_at(g, list(W))
    G = ref.graph
    HH = [lift_action(ref, h) for h in H]
    vorb = {v: min(h.vertex_perm[v] for h in HH) for v in G.vertex}
    if char:
        for v in G.vertex:
            n = sum(1 for h in HH if h.vertex_perm[v] == v)
            if n % char == 0:
                raise GraphError(f"stabilizer of order {n} at {v!r} is not tame in characteristic {char}")
    eorb = {e: min(h.edge_perm[e][0] for h in HH) for e in G.edge}
    qv = {}
    for v in G.vertices:
        r = vorb[v.id]
        qv[r] = Vertex(r, 0, v.infinite)
    qe = {}
    stab = {}
    for e in G.edges:
        r = eorb[e.id]
        if r in qe:
            continue
        e0 = G.edge[r]
        n = sum(1 for h in HH if h.edge_perm[r] == (r, False))
        if char and n % char == 0:
            raise GraphError(f"stabilizer of order {n} is not tame in characteristic {char}")
        stab[r] = n
        qe[r] = Edge(r, vorb[e0.tail], vorb[e0.head], INF if e0.length is INF else e0.length * n)
    Q = MetricGraph(tuple(qv[k] for k in sorted(qv)), tuple(qe[k] for k in sorted(qe)))
    em = {}
    for e in G.edges:
        r = eorb[e.id]
        rev = next(x for h in HH for f, x in [h.edge_perm[r]] if f == e.id)
        em[e.id] = EdgeImage(r, stab[r], rev)
    proj = HarmonicMorphism(G, Q, dict(vorb), em)
    return Quotient(Q, proj, ref, len(H))


# ---------------------------------------------------------------------------
# hyperelliptic involutions


@dataclass(frozen=True)
class Hyperelliptic:
    graph: MetricGraph  # the minimal model searched
    involution: GraphAutomorphism | None
    candidates: int  # involutions with tree quotient found (1 when unique)


def hyperelliptic_involution(g: MetricGraph, budget: int | None = DEFAULT_GROUP_BUDGET) -> Hyperelliptic:
    """The involution fixing positive-genus points whose quotient is a tree, if any."""
    m = minimize(g)
    if m.genus() < 2:
        raise GraphError("hyperelliptic questions need genus at least 2")
    bridges = m.bridges()
    fixed = {v.id for v in m.vertices if v.genus > 0}
    fixed |= {x for e in bridges for x in (m.edge[e].tail, m.edge[e].head)}
    pinned = {e: (e, False) for e in bridges}
    found = []
    for s in _search(m, frozenset(fixed), pinned, involution=True, budget=budget):
        q = quotient(m, [identity(m), s])
        if q.graph.first_betti() == 0:
            found.append(s)
    return Hyperelliptic(m, found[0] if found else None, len(found))


@dataclass(frozen=True)
class HyperellipticCheck:
    hyperelliptic: bool
    involution: GraphAutomorphism | None
    weighted_rank: int | None  # r#((p) + (s(p))) for the first vertex p
    graph: MetricGraph


def is_hyperelliptic(g: MetricGraph, budget: int | None = DEFAULT_GROUP_BUDGET) -> HyperellipticCheck:
    h = hyperelliptic_involution(g, budget)
    if h.involution is None:
        return HyperellipticCheck(False, None, None, h.graph)
    p = h.graph.vertices[0].id
    D = Divisor.of(Point.at(p), Point.at(h.involution.vertex_perm[p]))
    return HyperellipticCheck(True, h.involution, weighted_rank(h.graph, D), h.graph)


@dataclass(frozen=True)
class KappaRecord:
    vertex: str
    genus: int
    kappa: int
    bridges: int
    ok: bool  # 2 g(p) >= kappa(p) - 2
    ok_bridges: bool  # bridges at p <= 2 g(p) + 2


@dataclass(frozen=True)
class HyperellipticLift:
    liftable: bool
    records: tuple[KappaRecord, ...]
    consistent: bool  # kappa and bridge formulations agree everywhere
    involution: GraphAutomorphism


def hyperelliptic_liftable(g: MetricGraph, budget: int | None = DEFAULT_GROUP_BUDGET) -> HyperellipticLift:
    h = hyperelliptic_involution(g, budget)
    if h.involution is None:
        raise GraphError("graph is not hyperelliptic")
    m, s = h.graph, h.involution
    bridges = m.bridges()
    recs = []
    for v in m.vertices:
        fixed = s.vertex_perm[v.id] == v.id
        kappa = sum(1 for e, sg in m.directions(v.id) if fixed and s.fixes_direction(e, sg))
        nb = sum(1 for e, _ in m.directions(v.id) if e in bridges)
        recs.append(KappaRecord(v.id, v.genus, kappa, nb, 2 * v.genus >= kappa - 2, nb <= 2 * v.genus + 2))
    consistent = all(r.kappa == r.bridges and r.ok == r.ok_bridges for r in recs)
    return HyperellipticLift(all(r.ok for r in recs), tuple(recs), consistent, s)
