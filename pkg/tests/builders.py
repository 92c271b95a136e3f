"""Random instance generators and independent oracles shared by the tests."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

from tropical_lift.divisor_theory import RationalFunction
from tropical_lift.harmonic import Contraction, EdgeImage, HarmonicMorphism
from tropical_lift.metric_graph import Divisor, Edge, MetricGraph, Point, Vertex

LENGTHS = (F(1), F(2), F(1, 2), F(3, 2), F(2, 3))


def pt(v: str) -> Divisor:
    return Divisor.of(Point.at(v))


def vdiv(coeffs: dict) -> Divisor:
    return Divisor({Point.at(v): c for v, c in coeffs.items()})


# -- small graphs ----------------------------------------------------------


def small_multigraphs(max_vertices=3, max_edges=5, loops=True):
    """Connected unit-length multigraphs up to vertex relabelling."""
    seen = set()
    for n in range(1, max_vertices + 1):
        names = [f"v{i}" for i in range(n)]
        slots = list(itertools.combinations(range(n), 2)) + ([(i, i) for i in range(n)] if loops else [])
        for mult in itertools.product(range(max_edges + 1), repeat=len(slots)):
            if sum(mult) > max_edges or (n > 1 and sum(mult) == 0):
                continue
            key = min(tuple(sorted((min(p[a], p[b]), max(p[a], p[b]), m) for (a, b), m in zip(slots, mult) if m))
                      for p in itertools.permutations(range(n)))
            if key in seen:
                continue
            edges = []
            for (a, b), m in zip(slots, mult):
                edges += [(f"e{len(edges) + k}", names[a], names[b], 1) for k in range(m)]
            g = MetricGraph.build(names, edges)
            if g.is_connected():
                seen.add(key)
                yield g


def random_graph(rng: random.Random, n_max=4, e_max=6, loops=True, genus=False, lengths=LENGTHS) -> MetricGraph:
    while True:
        n = rng.randint(1, n_max)
        names = [f"v{i}" for i in range(n)]
        edges = []
        for i in range(1, n):  # spanning tree first
            edges.append((names[rng.randrange(i)], names[i]))
        for _ in range(rng.randint(0, e_max - len(edges)) if e_max > len(edges) else 0):
            a, b = rng.choice(names), rng.choice(names)
            if a == b and not loops:
                continue
            edges.append((a, b))
        if not edges and n == 1 and not genus:
            continue
        vs = [(v, rng.randint(0, 1) if genus else 0) for v in names]
        return MetricGraph.build(vs, [(f"e{k}", a, b, rng.choice(lengths)) for k, (a, b) in enumerate(edges)])


def random_vertex_divisor(rng: random.Random, g: MetricGraph, lo=-2, hi=2) -> Divisor:
    return vdiv({v: rng.randint(lo, hi) for v in g.finite_vertices})


# -- independent rank oracle on finite graphs -------------------------------


def _laplacian_fire(adj, D, v):
    D = dict(D)
    for w, m in adj[v].items():
        D[v] -= m
        D[w] += m
    return D


def winnable(adj: dict, D: dict) -> bool:
    """Greedy borrowing: D is equivalent to an effective divisor iff this terminates effective."""
    D = dict(D)
    borrowed = set()
    while True:
        debt = [v for v in sorted(D) if D[v] < 0]
        if not debt:
            return True
        if len(borrowed) == len(D):
            return False
        v = debt[0]
        borrowed.add(v)
        for w, m in adj[v].items():  # v borrows from each neighbour
            D[v] += m
            D[w] -= m


def adjacency(g: MetricGraph) -> dict:
    adj = {v: {} for v in g.vertex}
    for e in g.edges:
        if e.is_loop:
            continue
        adj[e.tail][e.head] = adj[e.tail].get(e.head, 0) + 1
        adj[e.head][e.tail] = adj[e.head].get(e.tail, 0) + 1
    return adj


def oracle_rank(g: MetricGraph, D: dict) -> int:
    """Baker-Norine rank of a vertex divisor on the combinatorial graph of g."""
    adj = adjacency(g)
    vs = sorted(g.vertex)
    D = {v: D.get(v, 0) for v in vs}
    if not winnable(adj, D):
        return -1
    k = 0
    while True:
        k += 1
        for combo in itertools.combinations_with_replacement(vs, k):
            E = dict(D)
            for v in combo:
                E[v] -= 1
            if not winnable(adj, E):
                return k - 1


# -- principal divisors --------------------------------------------------------


def random_function(rng: random.Random, n_max=3, e_max=4):
    """A random graph with lengths in {1, 2}, refined at edge midpoints, and an integer-valued function."""
    from tropical_lift.metric_graph import refine_at

    g = random_graph(rng, n_max, e_max, lengths=(F(1), F(2)))
    ref = refine_at(g, [g.point(e.id, e.length / 2) for e in g.edges])
    h = ref.graph
    vals = {v: F(rng.randint(-2, 2)) for v in h.finite_vertices}
    return h, RationalFunction(h, vals)


# -- harmonic morphisms onto trees with contractions -------------------------


def random_tree(rng: random.Random, n_max=4) -> MetricGraph:
    n = rng.randint(2, n_max)
    names = [f"t{i}" for i in range(n)]
    edges = [(f"f{i}", names[rng.randrange(i)], names[i], rng.choice(LENGTHS)) for i in range(1, n)]
    return MetricGraph.build(names, edges)


def _matrix(rng, rows, cols):
    """Random nonnegative integer matrix with the given margins."""
    rows, cols = list(rows), list(cols)
    M = [[0] * len(cols) for _ in rows]
    while any(rows):
        i = rng.choice([k for k, r in enumerate(rows) if r])
        j = rng.choice([k for k, c in enumerate(cols) if c])
        M[i][j] += 1
        rows[i] -= 1
        cols[j] -= 1
    return M


def _partition(rng, n):
    parts = []
    while n:
        k = rng.randint(1, n)
        parts.append(k)
        n -= k
    return parts


def random_contracting_morphism(rng: random.Random, d_max=3) -> HarmonicMorphism:
    """Finite harmonic map onto a random tree, then decorated with contracted edges, loops and cycles."""
    while True:
        T = random_tree(rng)
        d = rng.randint(1, d_max)
        over = {}
        vs, vmap, edges, emap = [], {}, [], {}
        for w in T.vertices:
            degs = _partition(rng, d)
            over[w.id] = []
            for k, x in enumerate(degs):
                vid = f"{w.id}_{k}"
                over[w.id].append((vid, x))
                vs.append(Vertex(vid, rng.randint(0, 1)))
                vmap[vid] = w.id
        for f in T.edges:
            A, B = over[f.tail], over[f.head]
            M = _matrix(rng, [x for _, x in A], [x for _, x in B])
            for i, (a, _) in enumerate(A):
                for j, (b, _) in enumerate(B):
                    for part in _partition(rng, M[i][j]) if M[i][j] else []:
                        eid = f"{f.id}_{len(edges)}"
                        edges.append(Edge(eid, a, b, f.length / part))
                        emap[eid] = EdgeImage(f.id, part, False)
        # contracted decorations
        for _ in range(rng.randint(1, 3)):
            base, _ = rng.choice([x for w in over.values() for x in w])
            w = vmap[base]
            kind = rng.choice(("pendant", "loop", "cycle", "between"))
            ln = rng.choice(LENGTHS)
            if kind == "loop":
                eid = f"c{len(edges)}"
                edges.append(Edge(eid, base, base, ln))
                emap[eid] = Contraction(w)
                continue
            if kind == "between" and len(over[w]) > 1:
                other = rng.choice([v for v, _ in over[w] if v != base])
            else:
                other = f"k{len(vs)}"
                vs.append(Vertex(other, rng.randint(0, 1)))
                vmap[other] = w
            reps = 2 if kind == "cycle" else 1
            for _ in range(reps):
                eid = f"c{len(edges)}"
                edges.append(Edge(eid, base, other, rng.choice(LENGTHS)))
                emap[eid] = Contraction(w)
        S = MetricGraph(tuple(vs), tuple(edges))
        if S.is_connected():
            return HarmonicMorphism(S, T, vmap, emap)
