"""Liftability certificates, genus enrichment and resolution of contractions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

from .divisor_theory import RationalFunction, principal_divisor, reduction
from .harmonic import (
    Contraction, EdgeImage, HarmonicMorphism, MorphismError, fiber, local_profiles, ramification,
    require_harmonic, validate_morphism,
)
from .hurwitz import (
    Budget, HurwitzQuery, WildRamification, compute_R, hurwitz_number, minimal_source_genus,
    nontrivial,
)
from .metric_graph import INF, Divisor, Edge, MetricGraph, Point, Vertex, refine_at

LIFTABLE = "liftable"
NOT_LIFTABLE = "not-liftable"
UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class VertexRecord:
    vertex: str
    d: int
    genus: int
    target_genus: int
    profiles: tuple[tuple[int, ...], ...]
    hurwitz: Union[Fraction, str]  # a value, "shortcut" or "unknown"
    nonempty: Union[bool, str]


@dataclass(frozen=True)
class LiftCertificate:
    verdict: str
    vertices: tuple[VertexRecord, ...]
    reasons: tuple[str, ...]
    char: int = 0

    @property
    def liftable(self) -> bool:
        return self.verdict == LIFTABLE


def _fmt(mu) -> str:
    return "(" + ",".join(map(str, mu)) + ")"


def _vertex_record(phi: HarmonicMorphism, v: str, char: int, budget: Budget | None) -> VertexRecord:
    S, T = phi.source, phi.target
    d = phi.local_degree(v)
    w = phi.vertex_map[v]
    profs = tuple(local_profiles(phi, v))
    gp, g = S.vertex[v].genus, T.vertex[w].genus
    rest = nontrivial(profs)
    if T.valence(w) == 2 and g == 0 and gp == 0 and profs == ((d,), (d,)):
        return VertexRecord(v, d, gp, g, profs, "shortcut", True)
    if d == 1 or (not rest and not 0 < char <= d):
        return VertexRecord(v, d, gp, g, profs, "shortcut", True)
    if 0 < char <= d:
        # hidden branch points may be wild; no decision procedure here
        return VertexRecord(v, d, gp, g, profs, UNKNOWN, UNKNOWN)
    q = HurwitzQuery(d, g, gp, rest)
    if compute_R(q).R < 0:
        return VertexRecord(v, d, gp, g, profs, Fraction(0), False)
    val = hurwitz_number(q, budget).value
    return VertexRecord(v, d, gp, g, profs, val, val != 0)


def liftability_certificate(phi: HarmonicMorphism, char: int = 0, budget: Budget | None = None) -> LiftCertificate:
    """Verdict from effectiveness and the local Hurwitz numbers at every finite vertex."""
    rep = require_harmonic(phi)
    if not rep.finite:
        raise MorphismError("morphism is not finite")
    if char:
        for e, a in phi.edge_map.items():
            if isinstance(a, EdgeImage) and a.degree % char == 0:
                raise WildRamification(f"edge {e!r} has degree {a.degree} divisible by {char}")
    ram = ramification(phi)
    bad = sorted((v, r) for v, r in ram.r.items() if r < 0)
    if bad:
        reasons = tuple(f"not effective at {v!r}: r = {r}" for v, r in bad)
        return LiftCertificate(NOT_LIFTABLE, (), reasons, char)
    records = []
    reasons = []
    for v in phi.source.vertices:
        if v.infinite:
            continue
        rec = _vertex_record(phi, v.id, char, budget)
        records.append(rec)
        tag = ",".join(_fmt(m) for m in nontrivial(rec.profiles))
        if rec.nonempty is False:
            reasons.append(f"H^{rec.d}_{{{rec.genus},{rec.target_genus}}}({tag}) = 0 at {v.id!r}")
        elif rec.nonempty == UNKNOWN:
            reasons.append(f"characteristic {char} <= local degree {rec.d} at {v.id!r}: no criterion")
    if any(r.nonempty is False for r in records):
        verdict = NOT_LIFTABLE
    elif any(r.nonempty == UNKNOWN for r in records):
        verdict = UNKNOWN
    else:
        verdict = LIFTABLE
    return LiftCertificate(verdict, tuple(records), tuple(reasons), char)


@dataclass(frozen=True)
class Enrichment:
    morphism: HarmonicMorphism
    genus: Mapping[str, int]
    certificate: LiftCertificate


def enrich_genus(phi: HarmonicMorphism, target_genus: Mapping[str, int] | None = None, char: int = 0,
                 budget: Budget | None = None) -> Enrichment:
    """Smallest source genus at each vertex making every local covering problem solvable."""
    rep = require_harmonic(phi)
    if not rep.finite:
        raise MorphismError("morphism is not finite")
    T = phi.target.with_genus(target_genus) if target_genus else phi.target
    base = HarmonicMorphism(phi.source, T, phi.vertex_map, phi.edge_map)
    genus = {}
    for v in phi.source.vertices:
        if v.infinite:
            continue
        d = base.local_degree(v.id)
        g = T.vertex[base.vertex_map[v.id]].genus
        genus[v.id] = minimal_source_genus(d, g, nontrivial(local_profiles(base, v.id)), char, budget).gprime
    out = HarmonicMorphism(phi.source.with_genus(genus), T, phi.vertex_map, phi.edge_map)
    return Enrichment(out, genus, liftability_certificate(out, char, budget))


# ---------------------------------------------------------------------------
# retractions of modified graphs


@dataclass(frozen=True)
class Retraction:
    """Map from a modified graph back onto the original one.

    Each new edge is either a piece (old edge, start, end) of an old edge or
    collapses onto a point of the old graph.
    """

    graph: MetricGraph
    base: MetricGraph
    vertices: Mapping[str, Point]
    edges: Mapping[str, Union[tuple[str, Fraction, object], Point]]

    def point(self, p: Point) -> Point:
        if p.vertex is not None:
            return self.vertices[p.vertex]
        img = self.edges[p.edge]
        if isinstance(img, Point):
            return img
        old, a, _ = img
        return self.base.point(old, a + p.offset)

    def divisor(self, D: Divisor) -> Divisor:
        return Divisor((self.point(p), c) for p, c in D.items())


# ---------------------------------------------------------------------------
# weak resolution


@dataclass(frozen=True)
class Resolution:
    morphism: HarmonicMorphism
    original: HarmonicMorphism
    source: Retraction
    target: Retraction
    trace: tuple[str, ...]


class _Builder:
    """Mutable copy of a morphism that records how new pieces retract."""

    def __init__(self, phi: HarmonicMorphism):
        S, T = phi.source, phi.target
        self.phi = phi
        self.sv: dict[str, Vertex] = {v.id: v for v in S.vertices}
        self.se: dict[str, Edge] = {e.id: e for e in S.edges}
        self.tv: dict[str, Vertex] = {v.id: v for v in T.vertices}
        self.te: dict[str, Edge] = {e.id: e for e in T.edges}
        self.vm: dict[str, str] = dict(phi.vertex_map)
        self.em: dict[str, Union[EdgeImage, Contraction]] = dict(phi.edge_map)
        self.s_vret: dict[str, Point] = {v: Point.at(v) for v in self.sv}
        self.s_eret: dict = {e.id: (e.id, Fraction(0), e.length) for e in S.edges}
        self.t_vret: dict[str, Point] = {v: Point.at(v) for v in self.tv}
        self.t_eret: dict = {e.id: (e.id, Fraction(0), e.length) for e in T.edges}
        self.trace: list[str] = []

    def fresh(self, table, stem: str) -> str:
        if stem not in table:
            return stem
        k = 1
        while f"{stem}#{k}" in table:
            k += 1
        return f"{stem}#{k}"

    # -- source ------------------------------------------------------------
    def add_sv(self, stem: str, image: str, ret: Point, infinite=False) -> str:
        vid = self.fresh(self.sv, stem)
        self.sv[vid] = Vertex(vid, 0, infinite)
        self.vm[vid] = image
        self.s_vret[vid] = ret
        return vid

    def add_se(self, stem: str, a: str, b: str, length, act, ret) -> str:
        eid = self.fresh(self.se, stem)
        self.se[eid] = Edge(eid, a, b, length)
        self.em[eid] = act
        self.s_eret[eid] = ret
        return eid

    # -- target ------------------------------------------------------------
    def add_tv(self, stem: str, ret: Point, infinite=False) -> str:
        vid = self.fresh(self.tv, stem)
        self.tv[vid] = Vertex(vid, 0, infinite)
        self.t_vret[vid] = ret
        return vid

    def add_te(self, stem: str, a: str, b: str, length, ret: Point) -> str:
        eid = self.fresh(self.te, stem)
        self.te[eid] = Edge(eid, a, b, length)
        self.t_eret[eid] = ret
        return eid

    def current(self) -> HarmonicMorphism:
        S = MetricGraph(tuple(self.sv.values()), tuple(self.se.values()))
        T = MetricGraph(tuple(self.tv.values()), tuple(self.te.values()))
        return HarmonicMorphism(S, T, dict(self.vm), dict(self.em))

    def local_degree(self, v: str) -> int:
        return self.current().local_degree(v)

    def over(self, y: str) -> list[str]:
        return [v for v in self.sv if self.vm[v] == y and not self.sv[v].infinite]

    def new_end(self, y: str, tag: str) -> tuple[str, str]:
        """Attach an infinite end at target vertex y; returns (edge, infinite vertex)."""
        w = self.add_tv(f"{tag}~inf", Point.at(y), infinite=True)
        return self.add_te(f"{tag}~end", y, w, INF, Point.at(y)), w

    def infinite_leg(self, x: str, target_edge: str, stem: str, ret: Point, degree: int = 1) -> str:
        f = self.te[target_edge]
        w = self.add_sv(f"{stem}~inf", f.head, ret, infinite=True)
        return self.add_se(f"{stem}~leg", x, w, INF, EdgeImage(target_edge, degree), ret)

    def filler(self, x: str, e0: str, einf: str, stem: str) -> None:
        """Finite edge over e0 followed by an infinite edge over einf, both of degree 1."""
        f0 = self.te[e0]
        ret = self.s_vret[x]
        m = self.add_sv(f"{stem}~f", f0.head, ret)
        self.add_se(f"{stem}~fe", x, m, f0.length, EdgeImage(e0, 1), ret)
        self.infinite_leg(m, einf, stem, ret)


def _split_contracted_loops(b: _Builder) -> None:
    for e in list(b.se.values()):
        act = b.em[e.id]
        if not (isinstance(act, Contraction) and e.is_loop):
            continue
        h = e.length / 2
        old = b.s_eret.pop(e.id)
        del b.se[e.id], b.em[e.id]
        m = b.add_sv(f"{e.id}~mid", act.vertex, _piece_point(b, old, h))
        b.add_se(f"{e.id}~1", e.tail, m, h, act, _sub_piece(old, 0, h))
        b.add_se(f"{e.id}~2", m, e.head, h, act, _sub_piece(old, h, e.length))
        b.trace.append(f"split contracted loop {e.id!r} at its midpoint")


def _sub_piece(old, a, c):
    if isinstance(old, Point):
        return old
    eid, start, _ = old
    return (eid, start + a, start + c)


def _piece_point(b: _Builder, old, t) -> Point:
    if isinstance(old, Point):
        return old
    eid, start, _ = old
    return b.phi.source.point(eid, start + t)


def weak_resolution(phi: HarmonicMorphism) -> Resolution:
    """Finite harmonic morphism between modifications agreeing with phi off its contracted set."""
    require_harmonic(phi)
    if not phi.target.is_tree():
        raise MorphismError("target is not a tree")
    if not phi.target.edges:
        raise MorphismError("target has no edges")
    b = _Builder(phi)
    T0 = phi.target

    # finite leaves of the target become infinite
    for y in [v.id for v in T0.vertices if not v.infinite and T0.valence(v.id) == 1]:
        degs = {x: b.local_degree(x) for x in b.over(y)}
        e, _ = b.new_end(y, y)
        for x, d in degs.items():
            for k in range(d):
                b.infinite_leg(x, e, f"{x}~{e}~{k}", b.s_vret[x])
        b.trace.append(f"made leaf {y!r} infinite")

    _split_contracted_loops(b)

    # a copy of the target at every non-regular vertex
    snapshot = b.current()
    for v in snapshot.non_regular_vertices():
        if b.sv[v].infinite:
            continue
        y = b.vm[v]
        ret = b.s_vret[v]
        names = {y: v}
        for w in list(b.tv):
            if w != y:
                names[w] = b.add_sv(f"{v}^{w}", w, ret, infinite=b.tv[w].infinite)
        for f in list(b.te.values()):
            b.add_se(f"{v}^{f.id}", names[f.tail], names[f.head], f.length, EdgeImage(f.id, 1), ret)
        b.trace.append(f"attached a copy of the target at non-regular vertex {v!r}")

    # resolve each contracted edge
    for e in [x for x in b.se.values() if isinstance(b.em[x.id], Contraction)]:
        y = b.em[e.id].vertex
        ret_e = b.s_eret.pop(e.id)
        del b.se[e.id], b.em[e.id]
        others = [x for x in b.over(y) if x not in (e.tail, e.head)]
        degs = {x: b.local_degree(x) for x in set(others) | {e.tail}}
        if e.is_infinite:
            end, w = b.new_end(y, f"{e.id}")
            b.vm[e.head] = w
            b.add_se(e.id, e.tail, e.head, INF, EdgeImage(end, 1), ret_e)
            for k in range(degs[e.tail] - 1):
                b.infinite_leg(e.tail, end, f"{e.id}~{e.tail}~{k}", b.s_vret[e.tail])
            for x in others:
                for k in range(degs[x]):
                    b.infinite_leg(x, end, f"{e.id}~{x}~{k}", b.s_vret[x])
            b.trace.append(f"mapped contracted infinite edge {e.id!r} onto a new end at {y!r}")
            continue
        degs[e.head] = b.local_degree(e.head)
        h = e.length / 2
        z = b.add_tv(f"{e.id}~z", Point.at(y))
        w = b.add_tv(f"{e.id}~inf", Point.at(y), infinite=True)
        e10 = b.add_te(f"{e.id}~e1", y, z, h, Point.at(y))
        e1i = b.add_te(f"{e.id}~e1inf", z, w, INF, Point.at(y))
        m = b.add_sv(f"{e.id}~m", z, _piece_point(b, ret_e, h))
        b.add_se(f"{e.id}~e4", e.tail, m, h, EdgeImage(e10, 1), _sub_piece(ret_e, 0, h))
        b.add_se(f"{e.id}~e5", m, e.head, h, EdgeImage(e10, 1, True), _sub_piece(ret_e, h, e.length))
        mret = b.s_vret[m]
        b.infinite_leg(m, e1i, f"{e.id}~e2", mret)
        b.infinite_leg(m, e1i, f"{e.id}~e3", mret)
        for x, extra in ((e.tail, degs[e.tail] - 1), (e.head, degs[e.head] - 1)):
            for k in range(extra):
                b.filler(x, e10, e1i, f"{e.id}~{x}~{k}")
        for x in others:
            for k in range(degs[x]):
                b.filler(x, e10, e1i, f"{e.id}~{x}~{k}")
        b.trace.append(f"resolved contracted edge {e.id!r} over {y!r}")

    out = b.current()
    src = Retraction(out.source, phi.source, dict(b.s_vret), dict(b.s_eret))
    tgt = Retraction(out.target, phi.target, dict(b.t_vret), dict(b.t_eret))
    return Resolution(out, phi, src, tgt, tuple(b.trace))


def agrees_off_contracted(res: Resolution) -> bool:
    """phi~ restricted to the non-contracted part of the original source equals phi."""
    phi, new = res.original, res.morphism
    for e in phi.source.edges:
        act = phi.edge_map[e.id]
        if isinstance(act, Contraction):
            continue
        if new.edge_map.get(e.id) != act or new.source.edge.get(e.id) != e:
            return False
    for v in phi.source.vertex:
        if new.vertex_map.get(v) != phi.vertex_map[v]:
            return False
    return all(new.target.edge.get(f.id) == f for f in phi.target.edges)


# ---------------------------------------------------------------------------
# effective linear equivalence


@dataclass(frozen=True)
class EffectiveWitness:
    morphism: HarmonicMorphism  # finite, onto a modification of the line
    E: Divisor
    plus: Divisor  # retraction of the fiber over +infinity
    minus: Divisor  # retraction of the fiber over -infinity
    D_plus: Divisor
    D_minus: Divisor
    ok: bool
    resolution: Resolution


def line_map(f: RationalFunction, D: Divisor) -> tuple[HarmonicMorphism, Callable[[Point], Point]]:
    """Harmonic map to a line given by f, with a leg of slope D(v) at each point of supp(D).

    Returns the map and the retraction of its source onto f's graph.
    """
    g = f.graph
    vals = sorted({f.value_at_vertex(v) for v in g.finite_vertices})
    level = {x: i for i, x in enumerate(vals)}
    top = len(vals) - 1
    tv = [Vertex(f"x{i}") for i in range(len(vals))] + [Vertex("-inf", 0, True), Vertex("+inf", 0, True)]
    te = [Edge(f"l{i}", f"x{i}", f"x{i + 1}", vals[i + 1] - vals[i]) for i in range(top)]
    te += [Edge("end-", "x0", "-inf", INF), Edge("end+", f"x{top}", "+inf", INF)]
    T = MetricGraph(tuple(tv), tuple(te))

    cuts = []
    for e in g.edges:
        s = f.slope(e.id)
        if s == 0:
            continue
        a, b = f.value_at_vertex(e.tail), f.value_at_vertex(e.head)
        cuts += [Point.on(e.id, (x - a) / s) for x in vals if min(a, b) < x < max(a, b)]
    ref = refine_at(g, cuts)
    G = ref.graph

    def value(v: str) -> Fraction:
        p = ref.restore(Point.at(v))
        return f(p)

    vm = {v: f"x{level[value(v)]}" for v in G.finite_vertices}
    em: dict = {}
    for e in G.edges:
        a, b = level[value(e.tail)], level[value(e.head)]
        if a == b:
            em[e.id] = Contraction(vm[e.tail])
        else:
            lo = min(a, b)
            em[e.id] = EdgeImage(f"l{lo}", int(abs(vals[b] - vals[a]) / e.length), a > b)
    sv, se = list(G.vertices), list(G.edges)
    legs: dict[str, Point] = {}
    for p, c in D.items():
        v = ref.relocate(p).vertex
        i = level[value(v)]
        steps = list(range(i, top)) if c > 0 else list(range(i - 1, -1, -1))
        prev = v
        for k in steps:
            nxt = f"leg_{v}@{k + 1 if c > 0 else k}"
            sv.append(Vertex(nxt))
            eid = f"leg_{v}.{len(legs)}"
            se.append(Edge(eid, prev, nxt, te[k].length / abs(c)))
            em[eid] = EdgeImage(f"l{k}", abs(c), c < 0)
            vm[nxt] = f"x{k + 1 if c > 0 else k}"
            legs[eid] = legs[nxt] = Point.at(v)
            prev = nxt
        w = f"inf_{v}"
        sv.append(Vertex(w, 0, True))
        eid = f"leg_{v}"
        se.append(Edge(eid, prev, w, INF))
        em[eid] = EdgeImage("end+" if c > 0 else "end-", abs(c))
        vm[w] = "+inf" if c > 0 else "-inf"
        legs[eid] = legs[w] = Point.at(v)
    phi0 = HarmonicMorphism(MetricGraph(tuple(sv), tuple(se)), T, vm, em)

    def retract(p: Point) -> Point:
        key = p.vertex if p.vertex is not None else p.edge
        if key in legs:
            return legs[key]
        return ref.restore(p)

    return phi0, retract


def effective_equivalence_witness(g: MetricGraph, D: Divisor, f: RationalFunction | None = None) -> EffectiveWitness:
    """Finite map to a tree whose two end fibers retract to D_+ + E and D_- + E.

    f must satisfy D + div(f) = 0 on g (or on a refinement of g, which then
    becomes the working model); when omitted it is computed by reduction.
    """
    if not g.is_finite_graph():
        raise MorphismError("graph must have no infinite edges")
    home = lambda p: p  # noqa: E731
    if f is None:
        red = reduction(g, D)
        if red.reduced != Divisor():
            raise MorphismError("D is not principal")
        f, D = red.function, red.refinement.relocate_divisor(g.normalize_divisor(D))
        home = red.refinement.restore
    else:
        D = f.graph.normalize_divisor(D)
    if D + principal_divisor(f) != Divisor():
        raise MorphismError("D + div(f) is not zero")
    phi0, retract = line_map(f, D)
    res = weak_resolution(phi0)
    psi = res.morphism

    def back(E: Divisor) -> Divisor:
        return Divisor((home(retract(res.source.point(p))), c) for p, c in E.items())

    plus = back(fiber(psi, Point.at("+inf")))
    minus = back(fiber(psi, Point.at("-inf")))
    E = Divisor((home(retract(p)), 1) for p in _nonregular_after_split(phi0))
    D = Divisor((home(p), c) for p, c in D.items())
    Dp, Dm = D.positive_part(), D.negative_part()
    ok = plus == Dp + E and minus == Dm + E and validate_morphism(psi).finite
    return EffectiveWitness(psi, E, plus, minus, Dp, Dm, ok, res)


def _nonregular_after_split(phi: HarmonicMorphism) -> list[Point]:
    """Points of phi's source that weak_resolution treats as non-regular."""
    pts = [Point.at(v) for v in phi.non_regular_vertices()]
    for e in phi.source.edges:
        if e.is_loop and phi.is_contracted(e.id):
            pts.append(phi.source.point(e.id, e.length / 2))
    return pts


# ---------------------------------------------------------------------------
# polynomial-like tree maps


@dataclass(frozen=True)
class PolynomialLike:
    liftable: bool
    end: str | None  # infinite source vertex of full local degree
    reasons: tuple[str, ...]


def polynomial_like_check(phi: HarmonicMorphism, char: int = 0) -> PolynomialLike:
    """Liftable without raising genera when phi looks like a polynomial map of P^1."""
    rep = require_harmonic(phi)
    S = phi.source
    if not (S.is_tree() and phi.target.is_tree()):
        raise MorphismError("source and target must be trees")
    d = rep.degree
    if 0 < char <= d:
        raise ValueError(f"characteristic {char} <= degree {d}")
    ends = [v.id for v in S.vertices if v.infinite and rep.local_degrees[v.id] == d]
    if not ends:
        return PolynomialLike(False, None, (f"no infinite vertex of local degree {d}",))
    reasons = []
    if not rep.finite:
        reasons.append("not finite")
    if not ramification(phi).generically_etale:
        reasons.append("not generically etale")
    end = ends[0]
    # the edge leaving each finite vertex toward the end
    toward: dict[str, str] = {}
    todo = [end]
    seen = {end}
    while todo:
        v = todo.pop()
        for e in S.incidence[v]:
            w = e.other(v)
            if w not in seen:
                seen.add(w)
                toward[w] = e.id
                todo.append(w)
    for v in S.finite_vertices:
        dv = rep.local_degrees[v]
        if phi.degree_of_edge(toward[v]) != dv:
            reasons.append(f"degree toward the end at {v!r} is {phi.degree_of_edge(toward[v])}, not {dv}")
    return PolynomialLike(not reasons, end, tuple(reasons))
