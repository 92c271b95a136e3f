"""Shipped example graphs, divisors and morphisms.

Most entries transcribe pictures that fix only the combinatorics; lengths
and a few structural details are chosen here and recorded in each entry's
note.  ``python3 -m tropical_lift.corpus`` regenerates the JSON files in
``data/`` from the builders below.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Callable, Mapping

from .harmonic import Contraction, EdgeImage, HarmonicMorphism
from .metric_graph import Divisor, MetricGraph, Point

F = Fraction


def assemble(source: MetricGraph, target: MetricGraph, vertex_map: Mapping[str, str],
             images: Mapping[str, tuple[str, int] | None]) -> HarmonicMorphism:
    """Morphism from edge images (None = contracted); orientation flags are inferred."""
    emap = {}
    for e in source.edges:
        img = images[e.id]
        if img is None:
            emap[e.id] = Contraction(vertex_map[e.tail])
            continue
        f = target.edge[img[0]]
        rev = vertex_map[e.tail] != f.tail
        emap[e.id] = EdgeImage(f.id, img[1], rev)
    return HarmonicMorphism(source, target, dict(vertex_map), emap)


def _pt(v: str) -> Divisor:
    return Divisor.of(Point.at(v))


# -- graphs -----------------------------------------------------------------


def loop(length=1) -> MetricGraph:
    return MetricGraph.build(["v"], [("e", "v", "v", length)])


def theta(lengths=(1, 1, 1)) -> MetricGraph:
    return MetricGraph.build(["u", "w"], [(f"e{i}", "u", "w", x) for i, x in enumerate(lengths)])


def glasses(loop_p=2, bridge=1, loop_q=2) -> MetricGraph:
    return MetricGraph.build(["p", "q"], [("lp", "p", "p", loop_p), ("b", "p", "q", bridge),
                                          ("lq", "q", "q", loop_q)])


def glasses_divisor(g: MetricGraph | None = None) -> Divisor:
    """(p) + (q) - 2(t), t the midpoint of the loop at q."""
    g = g or glasses()
    t = g.point("lq", g.edge["lq"].length / 2)
    return Divisor({Point.at("p"): 1, Point.at("q"): 1, t: -2})


def _k4(prefix: str):
    names = [prefix + c for c in "uwzx"]
    return names, [(f"{prefix}k{i}", a, b, 1) for i, (a, b) in enumerate(combinations(names, 2))]


def _petersen(prefix: str):
    outer = [prefix + f"o{i}" for i in range(5)]
    inner = [prefix + f"i{i}" for i in range(5)]
    es = []
    for i in range(5):
        es.append((f"{prefix}oo{i}", outer[i], outer[(i + 1) % 5], 1))
        es.append((f"{prefix}ii{i}", inner[i], inner[(i + 2) % 5], 1))
        es.append((f"{prefix}oi{i}", outer[i], inner[i], 1))
    return outer + inner, es


def _g3_piece(a: str, b: str, prefix: str):
    """K4 with pendant edges a-u and b-w."""
    vs, es = _k4(prefix)
    return vs + [a, b], es + [(prefix + "pa", a, prefix + "u", 1), (prefix + "pb", b, prefix + "w", 1)]


def _petersen_piece(a: str, b: str, prefix: str):
    vs, es = _petersen(prefix)
    return vs + [a, b], es + [(prefix + "pa", a, prefix + "o0", 1), (prefix + "pb", b, prefix + "i0", 1)]


def _banana(a: str, b: str, prefix: str, n: int):
    return [a, b], [(f"{prefix}b{i}", a, b, 1) for i in range(n)]


def _glue(*pieces) -> MetricGraph:
    vs: list[str] = []
    es = []
    for v, e in pieces:
        vs += [x for x in v if x not in vs]
        es += e
    return MetricGraph.build(vs, es)


def g3() -> MetricGraph:
    """K4 on u, w, z, x with pendant edges p-u and t-w; genus 3."""
    vs, es = _k4("")
    return MetricGraph.build(vs + ["p", "t"], es + [("pu", "p", "u", 1), ("tw", "t", "w", 1)])


def _a1_pieces(p="p", q="q", tag=""):
    t, s = "t" + tag, "s" + tag
    return (_g3_piece(p, t, f"L{tag}"), _banana(t, s, f"M{tag}", 3), _banana(q, s, f"R{tag}", 5))


def _a3_pieces(p="p", q="q", tag=""):
    t, s = "t" + tag, "s" + tag
    return (_g3_piece(p, t, f"L{tag}"), ([t, s], [(f"M{tag}br", t, s, 1)]),
            _petersen_piece(q, s, f"R{tag}"))


def a1() -> MetricGraph:
    """G3-type block (p, t), then a genus-2 banana t-s, then a genus-4 banana s-q; genus 9."""
    return _glue(*_a1_pieces())


def a3() -> MetricGraph:
    """G3-type block (p, t), a bridge t-s, then a Petersen block with pendants at s and q; genus 9."""
    return _glue(*_a3_pieces())


def g27() -> MetricGraph:
    """Wedge at p of two copies of a1 and one of a3; genus 27."""
    return _glue(*_a1_pieces("p", "q1", "1"), *_a1_pieces("p", "q2", "2"), *_a3_pieces("p", "q3", "3"))


def luo_g7() -> MetricGraph:
    """Triangle p, q, s with every side tripled; unit lengths, genus 7."""
    es = []
    for a, b in (("p", "q"), ("q", "s"), ("s", "p")):
        es += [(f"{a}{b}{i}", a, b, 1) for i in range(3)]
    return MetricGraph.build(["p", "q", "s"], es)


def luo_divisor() -> Divisor:
    return _pt("p") + _pt("q") + _pt("s")


def kappa_bridge(kappa: int, gp: int, bridge=1, cycle=2) -> MetricGraph:
    """p of genus gp joined by kappa bridges to vertices c_i, each carrying a loop."""
    vs = [("p", gp)] + [f"c{i}" for i in range(kappa)]
    es = []
    for i in range(kappa):
        es.append((f"b{i}", "p", f"c{i}", bridge))
        es.append((f"l{i}", f"c{i}", f"c{i}", cycle))
    return MetricGraph.build(vs, es)


GENUS2_TYPES = ("theta", "dumbbell", "figure_eight", "loop_weighted", "weighted_bridge",
                "weighted_pair", "weighted_point")


def genus2(kind: str) -> MetricGraph:
    """The seven stable genus-2 combinatorial types (some carry vertex genus)."""
    if kind == "theta":
        return theta((1, 2, 3))
    if kind == "dumbbell":
        return glasses(1, 1, 3)
    if kind == "figure_eight":
        return MetricGraph.build(["v"], [("a", "v", "v", 1), ("b", "v", "v", 2)])
    if kind == "loop_weighted":
        return MetricGraph.build([("v", 1)], [("a", "v", "v", 2)])
    if kind == "weighted_bridge":
        return MetricGraph.build([("u", 1), "w"], [("b", "u", "w", 1), ("a", "w", "w", 2)])
    if kind == "weighted_pair":
        return MetricGraph.build([("u", 1), ("w", 1)], [("b", "u", "w", 1)])
    if kind == "weighted_point":
        return MetricGraph.build([("v", 2)], [])
    raise KeyError(kind)


# -- morphisms ----------------------------------------------------------------


def star_map() -> HarmonicMorphism:
    """Degree 4 tree map with profiles (2,2), (2,2), (3,1) at the central vertex."""
    tv = ["c"] + [f"a{i}" for i in range(3)] + [(f"oo{i}", 0, True) for i in range(3)]
    te = [(f"s{i}", "c", f"a{i}", 6) for i in range(3)] + [(f"r{i}", f"a{i}", f"oo{i}", "inf") for i in range(3)]
    T = MetricGraph.build(tv, te)
    legs = {0: [(2, 3), (2, 3)], 1: [(2, 3), (2, 3)], 2: [(3, 2), (1, 6)]}
    sv, se, vm, img = ["c'"], [], {"c'": "c"}, {}
    for i, parts in legs.items():
        for j, (d, ln) in enumerate(parts):
            x, o = f"x{i}{j}", f"oo{i}{j}"
            sv += [x, (o, 0, True)]
            se += [(f"s{i}{j}", "c'", x, ln), (f"r{i}{j}", x, o, "inf")]
            vm[x], vm[o] = f"a{i}", f"oo{i}"
            img[f"s{i}{j}"] = (f"s{i}", d)
            img[f"r{i}{j}"] = (f"r{i}", d)
    return assemble(MetricGraph.build(sv, se), T, vm, img)


def loop_double_cover(length=1) -> HarmonicMorphism:
    """Cycle of length 2L onto a loop of length L, unramified."""
    S = MetricGraph.build(["u", "v"], [("a", "u", "v", length), ("b", "v", "u", length)])
    T = MetricGraph.build(["o"], [("e", "o", "o", length)])
    return assemble(S, T, {"u": "o", "v": "o"}, {"a": ("e", 1), "b": ("e", 1)})


def theta_fold(lengths=(2, 4, 6)) -> HarmonicMorphism:
    """Theta graph folded onto a tripod by the end-swapping involution."""
    sv, se, img = ["u", "w"], [], {}
    tv, te = ["o"], []
    vm = {"u": "o", "w": "o"}
    for i, ln in enumerate(lengths):
        h = F(ln) / 2
        sv.append(f"m{i}")
        tv.append(f"y{i}")
        vm[f"m{i}"] = f"y{i}"
        se += [(f"e{i}a", "u", f"m{i}", h), (f"e{i}b", "w", f"m{i}", h)]
        te.append((f"f{i}", "o", f"y{i}", h))
        img[f"e{i}a"] = img[f"e{i}b"] = (f"f{i}", 1)
    return assemble(MetricGraph.build(sv, se), MetricGraph.build(tv, te), vm, img)


def cycle_fold() -> HarmonicMorphism:
    """A cycle of two unit edges folded onto a unit segment."""
    S = MetricGraph.build(["u", "v"], [("a", "u", "v", 1), ("b", "u", "v", 1)])
    T = MetricGraph.build(["o", "x"], [("f", "o", "x", 1)])
    return assemble(S, T, {"u": "o", "v": "x"}, {"a": ("f", 1), "b": ("f", 1)})


def segment_power(d: int = 3) -> HarmonicMorphism:
    """Tree shadow of z -> z^d: one vertex, two infinite legs of expansion d."""
    T = MetricGraph.build(["o", ("L", 0, True), ("R", 0, True)], [("l", "o", "L", "inf"), ("r", "o", "R", "inf")])
    S = MetricGraph.build(["o'", ("L'", 0, True), ("R'", 0, True)],
                          [("l'", "o'", "L'", "inf"), ("r'", "o'", "R'", "inf")])
    return assemble(S, T, {"o'": "o", "L'": "L", "R'": "R"}, {"l'": ("l", d), "r'": ("r", d)})


def polynomial_like() -> HarmonicMorphism:
    """Degree 3 generically etale tree map with a totally ramified end over A."""
    T = MetricGraph.build(["o1", "o2"] + [(x, 0, True) for x in "ABCD"],
                          [("f", "o1", "o2", 2), ("fA", "o1", "A", "inf"), ("fB", "o1", "B", "inf"),
                           ("fC", "o2", "C", "inf"), ("fD", "o2", "D", "inf")])
    inf = ["A'", "B1", "B2", "C1", "D1", "D2", "C2", "D3"]
    S = MetricGraph.build(["p", "q1", "q2"] + [(x, 0, True) for x in inf],
                          [("pq1", "p", "q1", 1), ("pq2", "p", "q2", 2),
                           ("a", "p", "A'", "inf"), ("b1", "p", "B1", "inf"), ("b2", "p", "B2", "inf"),
                           ("c1", "q1", "C1", "inf"), ("d1", "q1", "D1", "inf"), ("d2", "q1", "D2", "inf"),
                           ("c2", "q2", "C2", "inf"), ("d3", "q2", "D3", "inf")])
    vm = {"p": "o1", "q1": "o2", "q2": "o2", "A'": "A", "B1": "B", "B2": "B",
          "C1": "C", "D1": "D", "D2": "D", "C2": "C", "D3": "D"}
    img = {"pq1": ("f", 2), "pq2": ("f", 1), "a": ("fA", 3), "b1": ("fB", 2), "b2": ("fB", 1),
           "c1": ("fC", 2), "d1": ("fD", 1), "d2": ("fD", 1), "c2": ("fC", 1), "d3": ("fD", 1)}
    return assemble(S, T, vm, img)


def contracted_tail(gp: int = 1) -> HarmonicMorphism:
    """p' of genus gp, local degree 2 over a tripod centre, plus one contracted edge to a genus-1 vertex."""
    T = MetricGraph.build(["p"] + [(x, 0, True) for x in "ABC"],
                          [(f"f{x}", "p", x, "inf") for x in "ABC"])
    S = MetricGraph.build([("p'", gp), ("x", 1)] + [(x + "'", 0, True) for x in "ABC"],
                          [(x.lower(), "p'", x + "'", "inf") for x in "ABC"] + [("k", "p'", "x", 1)])
    vm = {"p'": "p", "x": "p", **{x + "'": x for x in "ABC"}}
    return assemble(S, T, vm, {"a": ("fA", 2), "b": ("fB", 2), "c": ("fC", 2), "k": None})


def genus_drop() -> HarmonicMorphism:
    """Degree 2 map from a genus-0 vertex onto a genus-1 vertex: R = -2 there."""
    T = MetricGraph.build([("w", 1), ("W", 0, True)], [("f", "w", "W", "inf")])
    S = MetricGraph.build(["v", ("V1", 0, True), ("V2", 0, True)],
                          [("a", "v", "V1", "inf"), ("b", "v", "V2", "inf")])
    return assemble(S, T, {"v": "w", "V1": "W", "V2": "W"}, {"a": ("f", 1), "b": ("f", 1)})


def cycle_contraction() -> HarmonicMorphism:
    """Degree 1 map contracting a cycle hanging at p' onto the middle of a path."""
    T = MetricGraph.build(["a", "y", "b"], [("f", "a", "y", 1), ("h", "y", "b", 1)])
    S = MetricGraph.build(["a'", "p'", "b'", "u'"],
                          [("f'", "a'", "p'", 1), ("h'", "p'", "b'", 1), ("c1", "p'", "u'", 1), ("c2", "p'", "u'", 2)])
    return assemble(S, T, {"a'": "a", "p'": "y", "b'": "b", "u'": "y"},
                    {"f'": ("f", 1), "h'": ("h", 1), "c1": None, "c2": None})


# -- registry -------------------------------------------------------------------


@dataclass(frozen=True)
class Entry:
    name: str
    kind: str  # graph | divisor | morphism
    build: Callable
    note: str
    graph: str | None = None  # for divisors: the graph entry they live on

    @property
    def filename(self) -> str:
        return f"{self.name}.json"


ENTRIES: tuple[Entry, ...] = (
    Entry("star_map", "morphism", star_map,
          "figure-derived: degree 4 tree map, central profiles (2,2),(2,2),(3,1); lengths chosen (target legs 6)"),
    Entry("loop_double_cover", "morphism", loop_double_cover,
          "gallery: unramified degree 2 cover of a loop of length 1"),
    Entry("theta_fold", "morphism", theta_fold,
          "gallery: theta graph (lengths 2,4,6) folded onto a tripod, degree 2"),
    Entry("cycle_fold", "morphism", cycle_fold,
          "gallery: two-edge cycle folded onto a segment, degree 2"),
    Entry("segment_power", "morphism", segment_power,
          "gallery: tree shadow of z -> z^3, profiles ((3),(3))"),
    Entry("polynomial_like", "morphism", polynomial_like,
          "gallery: generically etale polynomial-like tree map of degree 3"),
    Entry("contracted_tail", "morphism", contracted_tail,
          "figure-derived: degree 2 vertex over a tripod centre with one contracted direction; r = 2g(p')-1"),
    Entry("genus_drop", "morphism", genus_drop,
          "gallery: degree 2 onto a genus-1 vertex from a genus-0 vertex; not effective"),
    Entry("cycle_contraction", "morphism", cycle_contraction,
          "figure-derived: degree 1 map contracting a cycle to an interior point of a path"),
    Entry("glasses", "graph", glasses,
          "figure-derived: loops of length 2 at p and q joined by a unit bridge; genus 2"),
    Entry("glasses_D", "divisor", glasses_divisor,
          "(p)+(q)-2(t), t the midpoint of the loop at q", graph="glasses"),
    Entry("g3", "graph", g3,
          "figure-derived: K4 on u,w,z,x with pendants p-u and t-w, unit lengths; 3(p) and 3(t) not equivalent"),
    Entry("a1", "graph", a1,
          "figure-derived: G3 block, banana of 3 edges, banana of 5 edges; genus 9; also stands for A2 (same family)"),
    Entry("a3", "graph", a3,
          "figure-derived: G3 block, bridge t-s, Petersen block with pendants; genus 9"),
    Entry("g27", "graph", g27,
          "figure-derived: wedge at p of two a1 blocks and one a3 block; genus 27"),
    Entry("luo_g7", "graph", luo_g7,
          "figure-derived: triangle p,q,s with tripled sides, unit lengths; genus 7"),
    Entry("luo_D", "divisor", luo_divisor, "(p)+(q)+(s), rank 1", graph="luo_g7"),
    Entry("kappa_bridge_3_0", "graph", lambda: kappa_bridge(3, 0),
          "figure-derived: genus-0 p with 3 bridges to loops; hyperelliptic, not liftable"),
    Entry("kappa_bridge_4_1", "graph", lambda: kappa_bridge(4, 1),
          "figure-derived: genus-1 p with 4 bridges to loops; hyperelliptic and liftable"),
)

BY_NAME = {e.name: e for e in ENTRIES}


def to_json(entry: Entry) -> dict:
    from . import io

    obj = entry.build()
    if entry.kind == "graph":
        body = io.graph_to_json(obj)
    elif entry.kind == "divisor":
        body = io.divisor_to_json(obj)
    else:
        body = io.morphism_to_json(obj)
    return body


def data_dir() -> Path:
    return Path(str(resources.files("tropical_lift") / "data"))


def path_of(name: str) -> Path:
    return data_dir() / BY_NAME[name].filename


def load(name: str):
    """Parse a shipped file into the library object it describes."""
    from . import io

    entry = BY_NAME[name]
    obj = json.loads(path_of(name).read_text())
    if entry.kind == "graph":
        return io.graph_from_json(obj)
    if entry.kind == "divisor":
        return io.divisor_from_json(obj)
    return io.morphism_from_json(obj)


def corpus() -> list[dict]:
    return [{"name": e.name, "kind": e.kind, "file": e.filename, "note": e.note,
             **({"graph": BY_NAME[e.graph].filename} if e.graph else {})} for e in ENTRIES]


def write_all(directory: Path | None = None) -> list[Path]:
    directory = directory or data_dir()
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for e in ENTRIES:
        p = directory / e.filename
        p.write_text(json.dumps(to_json(e), indent=2) + "\n")
        out.append(p)
    return out


if __name__ == "__main__":
    for p in write_all():
        print(p)
