"""Harmonic morphisms between metric graphs in edge-to-edge normal form."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .divisor_theory import RationalFunction, principal_divisor
from .metric_graph import (
    INF, Divisor, Edge, MetricGraph, Point, Refinement,
    canonical_divisor, refine_at, validate_graph,
)


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeImage:
    image: str
    degree: int
    reversed: bool = False


@dataclass(frozen=True)
class Contraction:
    vertex: str


EdgeAction = Union[EdgeImage, Contraction]


@dataclass(frozen=True)
class HarmonicMorphism:
    source: MetricGraph
    target: MetricGraph
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, EdgeAction]

    def degree_of_edge(self, e: str) -> int:
        act = self.edge_map[e]
        return 0 if isinstance(act, Contraction) else act.degree

    def is_contracted(self, e: str) -> bool:
        return isinstance(self.edge_map[e], Contraction)

    def direction_image(self, e: str, sign: int) -> tuple[str, int] | None:
        act = self.edge_map[e]
        if isinstance(act, Contraction):
            return None
        return (act.image, -sign if act.reversed else sign)

    def direction_sums(self, v: str) -> dict[tuple[str, int], int]:
        sums = {u: 0 for u in self.target.directions(self.vertex_map[v])}
        for e, sgn in self.source.directions(v):
            img = self.direction_image(e, sgn)
            if img is not None:
                sums[img] = sums.get(img, 0) + self.degree_of_edge(e)
        return sums

    def local_degree(self, v: str) -> int:
        """d_v: the common direction sum at v (0 when every incident edge is contracted)."""
        sums = self.direction_sums(v)
        vals = set(sums.values())
        if len(vals) > 1:
            raise MorphismError(f"not harmonic at {v!r}: direction sums {sorted(vals)}")
        return vals.pop() if vals else 0

    def point_degree(self, p: Point) -> int:
        if p.vertex is not None:
            return self.local_degree(p.vertex)
        return self.degree_of_edge(p.edge)

    def image(self, p: Point) -> Point:
        if p.vertex is not None:
            return Point.at(self.vertex_map[p.vertex])
        act = self.edge_map[p.edge]
        if isinstance(act, Contraction):
            return Point.at(act.vertex)
        t = act.degree * p.offset
        if act.reversed:
            t = self.target.edge[act.image].length - t
        return self.target.point(act.image, t)

    @property
    def degree(self) -> int:
        for w in self.target.vertices:
            return sum(self.local_degree(v) for v in self.source.vertex if self.vertex_map[v] == w.id)
        return 0

    def non_regular_vertices(self) -> list[str]:
        return [v.id for v in self.source.vertices
                if self.source.incidence[v.id] and all(self.is_contracted(e.id) for e in self.source.incidence[v.id])]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    problems: tuple[str, ...]
    local_degrees: Mapping[str, int]
    degree: int | None
    finite: bool
    surjective: bool


def validate_morphism(phi: HarmonicMorphism) -> MorphismReport:
    problems: list[str] = []
    S, T = phi.source, phi.target
    for name, g in (("source", S), ("target", T)):
        rep = validate_graph(g)
        problems += [f"{name}: {p}" for p in rep.problems]
    if problems:
        return MorphismReport(False, tuple(problems), {}, None, False, False)
    for v in S.vertex:
        if v not in phi.vertex_map:
            problems.append(f"vertex {v!r}: no image")
        elif phi.vertex_map[v] not in T.vertex:
            problems.append(f"vertex {v!r}: image {phi.vertex_map[v]!r} not in target")
    for e in S.edges:
        if e.id not in phi.edge_map:
            problems.append(f"edge {e.id!r}: no action")
    if problems:
        return MorphismReport(False, tuple(problems), {}, None, False, False)
    vm = phi.vertex_map
    for e in S.edges:
        act = phi.edge_map[e.id]
        if isinstance(act, Contraction):
            if act.vertex not in T.vertex:
                problems.append(f"edge {e.id!r}: contracted to unknown vertex {act.vertex!r}")
            elif vm[e.tail] != act.vertex or vm[e.head] != act.vertex:
                problems.append(f"edge {e.id!r}: contracted but ends map to {vm[e.tail]!r},{vm[e.head]!r}")
            continue
        if act.image not in T.edge:
            problems.append(f"edge {e.id!r}: unknown image edge {act.image!r}")
            continue
        if not isinstance(act.degree, int) or act.degree <= 0:
            problems.append(f"edge {e.id!r}: degree must be a positive integer")
            continue
        f = T.edge[act.image]
        ends = (f.head, f.tail) if act.reversed else (f.tail, f.head)
        if (vm[e.tail], vm[e.head]) != ends:
            problems.append(f"edge {e.id!r}: ends map to {vm[e.tail]!r},{vm[e.head]!r}, "
                            f"image edge {f.id!r} runs {ends[0]!r}->{ends[1]!r}")
        if e.is_infinite != f.is_infinite:
            problems.append(f"edge {e.id!r}: infinite edges must map to infinite edges")
        elif not e.is_infinite and f.length != act.degree * e.length:
            problems.append(f"edge {e.id!r}: length mismatch, {f.length} != {act.degree}*{e.length}")
    if problems:
        return MorphismReport(False, tuple(problems), {}, None, False, False)
    local: dict[str, int] = {}
    for v in S.vertex:
        sums = phi.direction_sums(v)
        vals = set(sums.values())
        if len(vals) > 1:
            detail = ", ".join(f"{e}{'+' if s > 0 else '-'}:{n}" for (e, s), n in sorted(sums.items()))
            problems.append(f"vertex {v!r}: not harmonic ({detail})")
        else:
            local[v] = vals.pop() if vals else 0
    if problems:
        return MorphismReport(False, tuple(problems), local, None, False, False)
    totals = {}
    for w in T.vertex:
        totals[f"vertex {w}"] = sum(local[v] for v in S.vertex if vm[v] == w)
    for f in T.edges:
        totals[f"edge {f.id}"] = sum(a.degree for a in phi.edge_map.values()
                                     if isinstance(a, EdgeImage) and a.image == f.id)
    degs = set(totals.values())
    if len(degs) > 1:
        problems.append("fiber degree varies: " + ", ".join(f"{k}={n}" for k, n in sorted(totals.items())))
        return MorphismReport(False, tuple(problems), local, None, False, False)
    degree = degs.pop()
    covered = {a.image for a in phi.edge_map.values() if isinstance(a, EdgeImage)}
    surjective = covered == set(T.edge) and set(vm.values()) == set(T.vertex)
    finite = surjective and not any(isinstance(a, Contraction) for a in phi.edge_map.values())
    return MorphismReport(True, (), local, degree, finite, surjective)


def require_harmonic(phi: HarmonicMorphism) -> MorphismReport:
    rep = validate_morphism(phi)
    if not rep.ok:
        raise MorphismError("invalid morphism: " + "; ".join(rep.problems))
    return rep


# ---------------------------------------------------------------------------
# raw input in path form


@dataclass(frozen=True)
class PathImage:
    """A source edge mapped linearly, with one expansion factor, over a target path."""

    path: tuple[tuple[str, bool], ...]  # (target edge, traversed head->tail)
    degree: int


def refine_to_compatible(source: MetricGraph, target: MetricGraph, vertex_map: Mapping[str, str],
                         edges: Mapping[str, Union[PathImage, Contraction, EdgeImage]]) -> HarmonicMorphism:
    """Split source edges so that every edge covers exactly one target edge."""
    cuts: dict[str, list[tuple[Fraction, str]]] = {}
    for e in source.edges:
        act = edges[e.id]
        if not isinstance(act, PathImage) or len(act.path) <= 1:
            continue
        acc = Fraction(0)
        stops = []
        pos = vertex_map[e.tail]
        for k, (tid, rev) in enumerate(act.path):
            f = target.edge[tid]
            start, end = (f.head, f.tail) if rev else (f.tail, f.head)
            if start != pos:
                raise MorphismError(f"edge {e.id!r}: path is not connected at {tid!r}")
            pos = end
            if k < len(act.path) - 1:
                if f.is_infinite:
                    raise MorphismError(f"edge {e.id!r}: infinite edge inside a path")
                acc += f.length
                stops.append((acc / act.degree, end))
        cuts[e.id] = stops
    for e in source.edges:
        act = edges[e.id]
        if isinstance(act, PathImage):
            lengths = [target.edge[t].length for t, _ in act.path]
            if e.is_infinite:
                if lengths[-1] is not INF or any(x is INF for x in lengths[:-1]):
                    raise MorphismError(f"edge {e.id!r}: infinite edge must end on an infinite target edge")
            else:
                if any(x is INF for x in lengths) or sum(lengths) != act.degree * e.length:
                    raise MorphismError(f"edge {e.id!r}: length mismatch, path length "
                                        f"{sum(x for x in lengths if x is not INF)} != {act.degree}*{e.length}")
    ref = refine_at(source, [Point.on(e, t) for e, stops in cuts.items() for t, _ in stops])
    vmap = dict(vertex_map)
    emap: dict[str, EdgeAction] = {}
    for e in source.edges:
        act = edges[e.id]
        pieces = ref.pieces[e.id]
        if isinstance(act, Contraction):
            for pid, a, _ in pieces:
                emap[pid] = act
                vmap[ref.graph.edge[pid].head] = act.vertex
            continue
        if isinstance(act, EdgeImage):
            emap[pieces[0][0]] = act
            continue
        for (pid, a, _), (tid, rev) in zip(pieces, act.path):
            emap[pid] = EdgeImage(tid, act.degree, rev)
            f = target.edge[tid]
            vmap[ref.graph.edge[pid].head] = f.tail if rev else f.head
    vmap = {v: vmap[v] for v in ref.graph.vertex}
    return HarmonicMorphism(ref.graph, target, vmap, emap)


def refine_morphism(phi: HarmonicMorphism, target_points: Iterable[Point] = (),
                    source_points: Iterable[Point] = ()) -> tuple[HarmonicMorphism, Refinement, Refinement]:
    """Common refinement making the given points (and their images/preimages) vertices."""
    S, T = phi.source, phi.target
    tpts = [T.normalize(p) for p in target_points]
    spts = [S.normalize(p) for p in source_points]
    tpts += [phi.image(p) for p in spts]
    rt = refine_at(T, tpts)
    cut_offsets: dict[str, set[Fraction]] = defaultdict(set)
    for p in spts:
        if p.vertex is None:
            cut_offsets[p.edge].add(p.offset)
    for e in S.edges:
        act = phi.edge_map[e.id]
        if isinstance(act, Contraction):
            continue
        f = T.edge[act.image]
        for _, a, _ in rt.pieces[f.id][1:]:
            t = a if not act.reversed else f.length - a
            cut_offsets[e.id].add(t / act.degree)
    rs = refine_at(S, [Point.on(e, t) for e, ts in cut_offsets.items() for t in ts])
    vmap = {}
    for v in rs.graph.vertex:
        vmap[v] = rt.relocate(phi.image(rs.restore(Point.at(v)))).vertex
    emap: dict[str, EdgeAction] = {}
    for old, pieces in rs.pieces.items():
        act = phi.edge_map[old]
        for pid, a, b in pieces:
            if isinstance(act, Contraction):
                emap[pid] = act
                continue
            f = T.edge[act.image]
            # image of the piece midpoint (or a point just past a on an infinite piece)
            probe = (a + b) / 2 if b is not INF else a + 1
            img = rt.relocate(phi.image(S.point(old, probe)) if probe != 0 else Point.at(f.tail))
            emap[pid] = EdgeImage(img.edge, act.degree, act.reversed)
    return HarmonicMorphism(rs.graph, rt.graph, vmap, emap), rs, rt


# ---------------------------------------------------------------------------
# ramification


@dataclass(frozen=True)
class RamificationData:
    R: Divisor
    r: Mapping[str, int]
    effective: bool
    generically_etale: bool
    etale: bool
    finite: bool
    riemann_hurwitz: bool


def ramification(phi: HarmonicMorphism) -> RamificationData:
    rep = require_harmonic(phi)
    S, T = phi.source, phi.target
    R: dict[Point, int] = {}
    r: dict[str, int] = {}
    for v in S.vertices:
        d = rep.local_degrees[v.id]
        w = T.vertex[phi.vertex_map[v.id]]
        dirs = S.directions(v.id)
        defect = sum(phi.degree_of_edge(e) - 1 for e, _ in dirs)
        Rv = d * (2 - 2 * w.genus) - (2 - 2 * v.genus) - defect
        R[Point.at(v.id)] = Rv
        if not v.infinite and d != 0:
            r[v.id] = Rv - sum(1 for e, _ in dirs if phi.is_contracted(e))
    Rdiv = Divisor(R)
    pull = Divisor({Point.at(v): rep.local_degrees[v] * c
                    for p, c in canonical_divisor(T).items()
                    for v in S.vertex if phi.vertex_map[v] == p.vertex})
    rh = canonical_divisor(S) == pull + Rdiv
    fin_R = [c for p, c in Rdiv.items() if not S.vertex[p.vertex].infinite]
    return RamificationData(Rdiv, r, all(x >= 0 for x in r.values()), not fin_R,
                            not Rdiv, rep.finite, rh)


# ---------------------------------------------------------------------------
# contracted set, fibers, profiles


def contracted_set(phi: HarmonicMorphism) -> list[MetricGraph]:
    """Connected components of contracted edges, plus isolated vertices of local degree 0."""
    S = phi.source
    con = [e for e in S.edges if phi.is_contracted(e.id)]
    verts = {x for e in con for x in (e.tail, e.head)}
    out = []
    for comp in S.components(verts, con):
        es = tuple(e for e in con if e.tail in comp)
        out.append(MetricGraph(tuple(S.vertex[v] for v in sorted(comp)), es))
    for v in S.vertices:
        if v.id not in verts and phi.local_degree(v.id) == 0:
            out.append(MetricGraph((v,), ()))
    return out


def fiber(phi: HarmonicMorphism, x: Point) -> Divisor:
    """D_x(phi) = pullback of (x)."""
    S, T = phi.source, phi.target
    x = T.normalize(x)
    if x.vertex is not None:
        over = [v for v in S.vertex if phi.vertex_map[v] == x.vertex]
        bad = [v for v in over if phi.local_degree(v) == 0]
        bad += [e for e, a in phi.edge_map.items() if isinstance(a, Contraction) and a.vertex == x.vertex]
        if bad:
            raise MorphismError(f"non-finite over point {x}: contracted {sorted(bad)}")
        return Divisor({Point.at(v): phi.local_degree(v) for v in over})
    f = T.edge[x.edge]
    out = {}
    for e, act in phi.edge_map.items():
        if isinstance(act, EdgeImage) and act.image == x.edge:
            t = f.length - x.offset if act.reversed else x.offset
            out[Point.on(e, t / act.degree)] = act.degree
    return Divisor(out)


def pullback(phi: HarmonicMorphism, D: Divisor) -> Divisor:
    out = Divisor()
    for p, c in D.items():
        out = out + c * fiber(phi, p)
    return out


def pushforward(phi: HarmonicMorphism, D: Divisor) -> Divisor:
    return Divisor((phi.image(phi.source.normalize(p)), c) for p, c in D.items())


def local_profiles(phi: HarmonicMorphism, v: str) -> list[tuple[int, ...]]:
    """Partitions of d_v, one per tangent direction at phi(v), in direction order."""
    d = phi.local_degree(v)
    if d == 0:
        raise MorphismError(f"local degree is 0 at {v!r}")
    parts: dict[tuple[str, int], list[int]] = {u: [] for u in phi.target.directions(phi.vertex_map[v])}
    for e, sgn in phi.source.directions(v):
        img = phi.direction_image(e, sgn)
        if img is not None:
            parts[img].append(phi.degree_of_edge(e))
    return [tuple(sorted(p, reverse=True)) for _, p in sorted(parts.items())]


# ---------------------------------------------------------------------------
# fibers over a tree


@dataclass(frozen=True)
class FiberEquivalence:
    ok: bool
    function: RationalFunction  # on the refined source; D_x1 - D_x2 = div(F)
    fiber1: Divisor  # in refined source coordinates
    fiber2: Divisor
    morphism: HarmonicMorphism
    source_refinement: Refinement


def _tree_path(T: MetricGraph, a: str, b: str) -> list[tuple[str, Edge]]:
    prev: dict[str, tuple[str, Edge] | None] = {a: None}
    todo = [a]
    while todo:
        v = todo.pop()
        for e in T.incidence[v]:
            w = e.other(v)
            if w not in prev:
                prev[w] = (v, e)
                todo.append(w)
    path = []
    v = b
    while prev[v] is not None:
        u, e = prev[v]
        path.append((u, e))
        v = u
    return list(reversed(path))


def fibers_equivalent_check(phi: HarmonicMorphism, x1: Point, x2: Point) -> FiberEquivalence:
    rep = require_harmonic(phi)
    T = phi.target
    if not T.is_tree():
        raise MorphismError("target is not a tree")
    if not rep.finite:
        raise MorphismError("morphism is not finite")
    for x in (x1, x2):
        if not T.is_finite_point(T.normalize(x)):
            raise MorphismError("fiber points must be finite")
    psi, rs, rt = refine_morphism(phi, [x1, x2])
    a = rt.relocate(T.normalize(x1)).vertex
    b = rt.relocate(T.normalize(x2)).vertex
    T2 = psi.target
    path = _tree_path(T2, a, b)
    pos = {a: Fraction(0)}
    acc = Fraction(0)
    for u, e in path:
        acc += e.length
        pos[e.other(u)] = acc
    # every other vertex takes the coordinate of the path vertex it hangs from
    h = dict(pos)
    todo = list(pos)
    while todo:
        v = todo.pop()
        for e in T2.incidence[v]:
            w = e.other(v)
            if w not in h:
                h[w] = h[v]
                todo.append(w)
    vals = {v: h[psi.vertex_map[v]] for v in psi.source.finite_vertices}
    F = RationalFunction(psi.source, vals)
    D1 = fiber(psi, Point.at(a))
    D2 = fiber(psi, Point.at(b))
    ok = D1 - D2 == principal_divisor(F)
    return FiberEquivalence(ok, F, D1, D2, psi, rs)
