"""Exact-rational metric graphs with a genus function.

A graph is stored as a finite model: vertices carry a genus and an
``infinite`` flag, edges carry a positive rational length or ``INF``.
Points are either vertices or interior edge points (offset from the tail);
divisors are finite integer combinations of points.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping


class GraphError(ValueError):
    """Raised when an operation receives an invalid graph or point."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


def _length(x):
    if x is INF or x == "inf":
        return INF
    return as_fraction(x)


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0
    infinite: bool = False


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: object  # Fraction or INF

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def is_infinite(self) -> bool:
        return self.length is INF

    def other(self, v: str) -> str:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise GraphError(f"vertex {v!r} is not an end of edge {self.id!r}")


@dataclass(frozen=True)
class Point:
    """A vertex, or an interior point of an edge at ``offset`` from its tail."""

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    @classmethod
    def at(cls, vertex: str) -> "Point":
        return cls(vertex=vertex)

    @classmethod
    def on(cls, edge: str, offset) -> "Point":
        return cls(edge=edge, offset=as_fraction(offset))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self):
        if self.vertex is not None:
            return (0, self.vertex, "", Fraction(0))
        return (1, "", self.edge, self.offset)

    def __str__(self) -> str:
        if self.vertex is not None:
            return self.vertex
        return f"{self.edge}@{self.offset}"


class Divisor(Mapping):
    """Finite formal integer combination of points; immutable and hashable."""

    __slots__ = ("_data", "_hash")

    def __init__(self, entries=None):
        data: dict[Point, int] = defaultdict(int)
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for p, c in items:
                if not isinstance(p, Point):
                    raise TypeError(f"divisor keys must be Points, got {p!r}")
                data[p] += int(c)
        self._data = {p: c for p, c in data.items() if c != 0}
        self._hash = None

    @classmethod
    def of(cls, *points: Point) -> "Divisor":
        return cls(Counter(points))

    def __getitem__(self, p: Point) -> int:
        return self._data.get(p, 0)

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted(self._data, key=Point.sort_key))

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, p) -> bool:
        return p in self._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Divisor):
            return self._data == other._data
        return NotImplemented

    def __add__(self, other: "Divisor") -> "Divisor":
        d = dict(self._data)
        for p, c in other._data.items():
            d[p] = d.get(p, 0) + c
        return Divisor(d)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._data.items()})

    def __mul__(self, k: int) -> "Divisor":
        return Divisor({p: k * c for p, c in self._data.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self._data:
            return "Divisor(0)"
        terms = " + ".join(f"{c}({p})" for p, c in self.items())
        return f"Divisor({terms})"

    @property
    def degree(self) -> int:
        return sum(self._data.values())

    @property
    def support(self) -> list[Point]:
        return list(self)

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._data.values())

    def positive_part(self) -> "Divisor":
        return Divisor({p: c for p, c in self._data.items() if c > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._data.items() if c < 0})


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable) -> "MetricGraph":
        """Build from Vertex/Edge objects or plain tuples.

        Vertices may be ``id``, ``(id, genus)`` or ``(id, genus, infinite)``;
        edges may be ``(id, tail, head, length)``. Infinite edges are stored
        with the finite end as tail.
        """
        vs = []
        for v in vertices:
            if isinstance(v, Vertex):
                vs.append(v)
            elif isinstance(v, str):
                vs.append(Vertex(v))
            else:
                vs.append(Vertex(*v))
        inf_ids = {v.id for v in vs if v.infinite}
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                eid, a, b, ln = e
                e = Edge(eid, a, b, _length(ln))
            elif not (e.length is INF or isinstance(e.length, Fraction)):
                e = Edge(e.id, e.tail, e.head, _length(e.length))
            if e.tail in inf_ids and e.head not in inf_ids:
                e = Edge(e.id, e.head, e.tail, e.length)
            es.append(e)
        return cls(tuple(vs), tuple(es))

    @cached_property
    def vertex(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def edge(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def incidence(self) -> dict[str, list[Edge]]:
        inc: dict[str, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if e.tail in inc:
                inc[e.tail].append(e)
            if e.head in inc and e.head != e.tail:
                inc[e.head].append(e)
        return inc

    def genus_of(self, v: str) -> int:
        return self.vertex[v].genus

    def valence(self, v: str) -> int:
        return sum(2 if e.is_loop else 1 for e in self.incidence[v])

    def directions(self, v: str) -> list[tuple[str, int]]:
        """Tangent directions at vertex v as (edge id, +1 leaving tail / -1 leaving head)."""
        out = []
        for e in self.incidence[v]:
            if e.tail == v:
                out.append((e.id, 1))
            if e.head == v:
                out.append((e.id, -1))
        return out

    def neighbours(self, v: str) -> list[str]:
        return [e.other(v) if not e.is_loop else v for e in self.incidence[v]]

    @property
    def finite_vertices(self) -> list[str]:
        return [v.id for v in self.vertices if not v.infinite]

    @property
    def finite_edges(self) -> list[Edge]:
        return [e for e in self.edges if not e.is_infinite]

    def is_finite_graph(self) -> bool:
        return all(not v.infinite for v in self.vertices)

    # -- points ---------------------------------------------------------

    def point(self, edge: str, offset) -> Point:
        """Normalized point at ``offset`` from the tail of ``edge``."""
        e = self.edge[edge]
        t = as_fraction(offset)
        if t < 0 or (e.length is not INF and t > e.length):
            raise GraphError(f"offset {t} outside edge {edge!r}")
        if t == 0:
            return Point.at(e.tail)
        if e.length is not INF and t == e.length:
            return Point.at(e.head)
        return Point.on(edge, t)

    def normalize(self, p: Point) -> Point:
        if p.vertex is not None:
            if p.vertex not in self.vertex:
                raise GraphError(f"unknown vertex {p.vertex!r}")
            return p
        if p.edge not in self.edge:
            raise GraphError(f"unknown edge {p.edge!r}")
        return self.point(p.edge, p.offset)

    def normalize_divisor(self, D: Divisor) -> Divisor:
        return Divisor((self.normalize(p), c) for p, c in D.items())

    def is_finite_point(self, p: Point) -> bool:
        if p.vertex is not None:
            return not self.vertex[p.vertex].infinite
        return True

    def point_directions(self, p: Point) -> list[tuple[str, int]]:
        if p.vertex is not None:
            return self.directions(p.vertex)
        return [(p.edge, 1), (p.edge, -1)]

    def point_genus(self, p: Point) -> int:
        return self.vertex[p.vertex].genus if p.vertex is not None else 0

    def total_length(self) -> Fraction:
        return sum((e.length for e in self.finite_edges), Fraction(0))

    # -- structure -------------------------------------------------------

    def components(self, vertex_ids=None, edges=None) -> list[set[str]]:
        vids = set(self.vertex) if vertex_ids is None else set(vertex_ids)
        es = self.edges if edges is None else edges
        parent = {v: v for v in vids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in es:
            if e.tail in vids and e.head in vids:
                a, b = find(e.tail), find(e.head)
                if a != b:
                    parent[a] = b
        groups: dict[str, set[str]] = defaultdict(set)
        for v in vids:
            groups[find(v)].add(v)
        return sorted(groups.values(), key=lambda s: min(s))

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def bridges(self) -> set[str]:
        """Edge ids whose removal disconnects the graph."""
        out = set()
        base = len(self.components())
        for e in self.edges:
            if e.is_loop:
                continue
            rest = [f for f in self.edges if f.id != e.id]
            if len(self.components(edges=rest)) > base:
                out.add(e.id)
        return out

    def first_betti(self) -> int:
        fv = [v for v in self.finite_vertices]
        fe = [e for e in self.edges if e.tail in fv and e.head in fv and not e.is_infinite]
        comps = len(self.components(fv, fe))
        return len(fe) - len(fv) + comps

    def genus(self) -> int:
        return self.first_betti() + sum(v.genus for v in self.vertices)

    def is_tree(self) -> bool:
        return self.first_betti() == 0

    def fresh_vertex_id(self, stem: str) -> str:
        return _fresh(stem, self.vertex)

    def fresh_edge_id(self, stem: str) -> str:
        return _fresh(stem, self.edge)

    def with_genus(self, genus: Mapping[str, int]) -> "MetricGraph":
        vs = tuple(Vertex(v.id, genus.get(v.id, v.genus), v.infinite) for v in self.vertices)
        return MetricGraph(vs, self.edges)

    def finite_part(self) -> "MetricGraph":
        vs = tuple(v for v in self.vertices if not v.infinite)
        es = tuple(e for e in self.edges if not e.is_infinite)
        return MetricGraph(vs, es)


def _fresh(stem: str, taken) -> str:
    if stem not in taken:
        return stem
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


# ---------------------------------------------------------------------------
# validation and genus


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()


def validate_graph(g: MetricGraph) -> ValidationReport:
    problems: list[str] = []
    ids = [v.id for v in g.vertices]
    for vid, n in Counter(ids).items():
        if n > 1:
            problems.append(f"duplicate vertex id {vid!r}")
    for eid, n in Counter(e.id for e in g.edges).items():
        if n > 1:
            problems.append(f"duplicate edge id {eid!r}")
    for v in g.vertices:
        if not isinstance(v.genus, int) or isinstance(v.genus, bool) or v.genus < 0:
            problems.append(f"vertex {v.id!r}: negative or non-integer genus")
        if v.infinite and v.genus != 0:
            problems.append(f"vertex {v.id!r}: infinite vertex with nonzero genus")
    known = set(ids)
    ends_ok = True
    for e in g.edges:
        for end in (e.tail, e.head):
            if end not in known:
                problems.append(f"edge {e.id!r}: unknown end {end!r}")
                ends_ok = False
    if not ends_ok:
        return ValidationReport(False, tuple(problems))
    for e in g.edges:
        inf_ends = sum(g.vertex[x].infinite for x in (e.tail, e.head)) if not e.is_loop else (
            2 if g.vertex[e.tail].infinite else 0)
        if e.is_infinite:
            if inf_ends != 1:
                problems.append(f"edge {e.id!r}: bad infinite edge (needs exactly one infinite end)")
        else:
            if e.length <= 0:
                problems.append(f"edge {e.id!r}: nonpositive length")
            if inf_ends:
                problems.append(f"edge {e.id!r}: bad infinite edge (finite length at an infinite vertex)")
    for v in g.vertices:
        if v.infinite and g.valence(v.id) != 1:
            problems.append(f"vertex {v.id!r}: infinite vertex must have valence 1")
    if not g.vertices:
        problems.append("empty graph")
    elif not g.is_connected():
        problems.append("disconnected")
    return ValidationReport(not problems, tuple(problems))


def require_valid(g: MetricGraph) -> MetricGraph:
    rep = validate_graph(g)
    if not rep.ok:
        raise GraphError("invalid graph: " + "; ".join(rep.problems))
    return g


@dataclass(frozen=True)
class GenusData:
    first_betti: int
    genus: int
    canonical: Divisor


def canonical_divisor(g: MetricGraph) -> Divisor:
    return Divisor({Point.at(v.id): g.valence(v.id) + 2 * v.genus - 2 for v in g.vertices})


def genus_data(g: MetricGraph) -> GenusData:
    b = g.first_betti()
    return GenusData(b, b + sum(v.genus for v in g.vertices), canonical_divisor(g))


# ---------------------------------------------------------------------------
# refinement and modification


@dataclass(frozen=True)
class Refinement:
    """A refined model together with the relocation of old coordinates."""

    original: MetricGraph
    graph: MetricGraph
    # old edge id -> list of (new edge id, start offset, end offset) along the old edge
    pieces: Mapping[str, tuple[tuple[str, Fraction, object], ...]]

    def relocate(self, p: Point) -> Point:
        p = self.original.normalize(p)
        if p.vertex is not None:
            return p
        for eid, a, b in self.pieces[p.edge]:
            if p.offset == a:
                return Point.at(self.graph.edge[eid].tail)
            if b is INF or p.offset < b:
                return Point.on(eid, p.offset - a)
        raise GraphError(f"cannot relocate {p}")

    def relocate_divisor(self, D: Divisor) -> Divisor:
        return Divisor((self.relocate(p), c) for p, c in D.items())

    def restore(self, p: Point) -> Point:
        """Inverse of relocate: a point of the refined model in old coordinates."""
        if p.vertex is not None:
            if p.vertex in self.original.vertex:
                return p
            for old, segs in self.pieces.items():
                for eid, a, _ in segs:
                    if self.graph.edge[eid].tail == p.vertex and a != 0:
                        return Point.on(old, a)
            raise GraphError(f"unknown vertex {p.vertex!r}")
        for old, segs in self.pieces.items():
            for eid, a, _ in segs:
                if eid == p.edge:
                    return self.original.point(old, a + p.offset)
        raise GraphError(f"unknown edge {p.edge!r}")


def _offset_name(t: Fraction) -> str:
    return f"{t.numerator}" if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


def refine_at(g: MetricGraph, pts: Iterable[Point]) -> Refinement:
    """Promote every given point to a (genus 0) vertex; the metric space is unchanged."""
    cuts: dict[str, set[Fraction]] = defaultdict(set)
    for p in pts:
        if p.vertex is None and p.offset is None:
            raise GraphError("point without coordinates")
        p = g.normalize(p)
        if p.vertex is None:
            cuts[p.edge].add(p.offset)
    vertices = list(g.vertices)
    taken_v = set(g.vertex)
    taken_e = set(g.edge)
    edges: list[Edge] = []
    pieces: dict[str, tuple] = {}
    for e in g.edges:
        if e.id not in cuts:
            edges.append(e)
            pieces[e.id] = ((e.id, Fraction(0), e.length),)
            continue
        offs = sorted(cuts[e.id])
        names = []
        for t in offs:
            vid = _fresh(f"{e.id}@{_offset_name(t)}", taken_v)
            taken_v.add(vid)
            names.append(vid)
            vertices.append(Vertex(vid))
        stops = [Fraction(0)] + offs + [e.length]
        ends = [e.tail] + names + [e.head]
        segs = []
        taken_e.discard(e.id)
        for i in range(len(stops) - 1):
            eid = _fresh(f"{e.id}.{i}", taken_e)
            taken_e.add(eid)
            a, b = stops[i], stops[i + 1]
            ln = INF if b is INF else b - a
            edges.append(Edge(eid, ends[i], ends[i + 1], ln))
            segs.append((eid, a, b))
        pieces[e.id] = tuple(segs)
    return Refinement(g, MetricGraph(tuple(vertices), tuple(edges)), pieces)


@dataclass(frozen=True)
class Modification:
    """Result of a tropical modification with its retraction onto the old graph."""

    original: MetricGraph
    graph: MetricGraph
    base: Point  # attachment point, as a vertex of the new graph
    new_edge: str
    new_vertex: str
    refinement: Refinement

    def retract(self, p: Point) -> Point:
        if p.vertex == self.new_vertex or p.edge == self.new_edge:
            return self.refinement.restore(self.base)
        return self.refinement.restore(p)

    def retract_divisor(self, D: Divisor) -> Divisor:
        return Divisor((self.retract(p), c) for p, c in D.items())


def elementary_modification(g: MetricGraph, p: Point, vertex_id: str | None = None,
                            edge_id: str | None = None) -> Modification:
    """Attach an infinite leaf at the finite point p."""
    if not g.is_finite_point(g.normalize(p)):
        raise GraphError("modification point must be finite")
    ref = refine_at(g, [p])
    h = ref.graph
    base = ref.relocate(p)
    vid = _fresh(vertex_id or f"inf_{base.vertex}", h.vertex)
    eid = _fresh(edge_id or f"leg_{base.vertex}", h.edge)
    graph = MetricGraph(h.vertices + (Vertex(vid, 0, True),),
                        h.edges + (Edge(eid, base.vertex, vid, INF),))
    return Modification(g, graph, base, eid, vid, ref)


# ---------------------------------------------------------------------------
# minimization


def minimize(g: MetricGraph) -> MetricGraph:
    """Minimal model: strip infinite legs and genus-0 trees, smooth 2-valent genus-0 points."""
    require_valid(g)
    if g.genus() == 0:
        raise GraphError("rational curve: genus 0 graphs have no minimal model")
    verts = {v.id: v for v in g.vertices if not v.infinite}
    edges = {e.id: e for e in g.edges if not e.is_infinite}

    def valence(v):
        return sum((e.tail == v) + (e.head == v) for e in edges.values())

    changed = True
    while changed:
        changed = False
        for vid in sorted(verts):
            v = verts[vid]
            if v.genus == 0 and valence(vid) <= 1 and len(verts) > 1:
                for eid in [e.id for e in edges.values() if vid in (e.tail, e.head)]:
                    del edges[eid]
                del verts[vid]
                changed = True
    changed = True
    while changed:
        changed = False
        for vid in sorted(verts):
            v = verts[vid]
            inc = [e for e in edges.values() if vid in (e.tail, e.head)]
            if v.genus != 0 or len(inc) != 2 or valence(vid) != 2:
                continue
            e1, e2 = sorted(inc, key=lambda e: e.id)
            a = e1.other(vid)
            b = e2.other(vid)
            del edges[e1.id], edges[e2.id]
            edges[e1.id] = Edge(e1.id, a, b, e1.length + e2.length)
            del verts[vid]
            changed = True
            break
    order = [v.id for v in g.vertices]
    vs = tuple(verts[v] for v in order if v in verts)
    es = tuple(e for e in sorted(edges.values(), key=lambda e: e.id))
    return MetricGraph(vs, es)


# ---------------------------------------------------------------------------
# uniform subdivision


@dataclass(frozen=True)
class Subdivision:
    """Finite loopless multigraph obtained by cutting into segments of length 1/N."""

    graph: MetricGraph
    scale: int
    n: int
    adjacency: tuple[tuple[tuple[int, int], ...], ...]  # per vertex: (neighbour, multiplicity)
    points: tuple[Point, ...]  # lattice index -> point of the (finite part of the) graph
    index: Mapping[Point, int]
    model_indices: tuple[int, ...]  # original vertices plus one interior point per loop

    @property
    def edge_count(self) -> int:
        return sum(m for nb in self.adjacency for _, m in nb) // 2

    def degree(self, i: int) -> int:
        return sum(m for _, m in self.adjacency[i])

    def lattice_index(self, p: Point) -> int:
        p = self.graph.normalize(p)
        try:
            return self.index[p]
        except KeyError:
            raise GraphError(f"point {p} is not a lattice point at scale {self.scale}") from None

    def to_vector(self, D: Divisor) -> list[int]:
        vec = [0] * self.n
        for p, c in D.items():
            vec[self.lattice_index(p)] += c
        return vec

    def to_divisor(self, vec: Iterable[int]) -> Divisor:
        return Divisor((self.points[i], c) for i, c in enumerate(vec) if c)


def subdivision_scale(g: MetricGraph, pts: Iterable[Point] = ()) -> int:
    dens = [e.length.denominator for e in g.finite_edges]
    for p in pts:
        p = g.normalize(p)
        if p.vertex is None:
            dens.append(p.offset.denominator)
    n = math.lcm(*dens) if dens else 1
    if any(e.is_loop and e.length * n == 1 for e in g.finite_edges):
        n *= 2
    return n


def uniform_subdivision(g: MetricGraph, pts: Iterable[Point] = (), scale: int | None = None) -> Subdivision:
    """Subdivide the finite part into unit segments after scaling lengths by N.

    N is the least common denominator of lengths and point offsets, doubled
    when a loop would otherwise become a single unit segment (the lattice
    graph is kept loopless).
    """
    pts = list(pts)
    fin = g.finite_part()
    n = scale if scale is not None else subdivision_scale(fin, pts)
    points: list[Point] = []
    index: dict[Point, int] = {}

    def add(p: Point) -> int:
        index[p] = len(points)
        points.append(p)
        return index[p]

    for v in fin.vertices:
        add(Point.at(v.id))
    adj: list[Counter] = [Counter() for _ in fin.vertices]
    loop_mid: list[int] = []
    for e in fin.edges:
        k = e.length * n
        if k.denominator != 1:
            raise GraphError(f"scale {n} does not clear length of edge {e.id!r}")
        k = int(k)
        chain = [index[Point.at(e.tail)]]
        for j in range(1, k):
            chain.append(add(Point.on(e.id, Fraction(j, n))))
            adj.append(Counter())
        chain.append(index[Point.at(e.head)])
        for a, b in zip(chain, chain[1:]):
            if a == b:
                raise GraphError("loop of unit length in subdivision")
            adj[a][b] += 1
            adj[b][a] += 1
        if e.is_loop:
            loop_mid.append(chain[len(chain) // 2])
    for p in pts:
        p = fin.normalize(p)
        if p not in index:
            raise GraphError(f"point {p} is not a lattice point at scale {n}")
    adjacency = tuple(tuple(sorted(c.items())) for c in adj)
    model = tuple(sorted(set(range(len(fin.vertices))) | set(loop_mid)))
    return Subdivision(fin, n, len(points), adjacency, tuple(points), index, model)
