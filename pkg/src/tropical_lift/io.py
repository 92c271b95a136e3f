"""JSON (de)serialization for graphs, divisors, functions, morphisms and queries."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .divisor_theory import NEG_INF, POS_INF, RationalFunction
from .harmonic import Contraction, EdgeImage, HarmonicMorphism, PathImage
from .metric_graph import INF, Divisor, Edge, MetricGraph, Point, Vertex


class SchemaError(ValueError):
    """Input does not match the expected JSON schema."""


def rat(x) -> str:
    if x is INF:
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s, what="rational") -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise SchemaError(f"{what}: expected 'p/q' string or integer, got {s!r}")
    try:
        return Fraction(s)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SchemaError(f"{what}: cannot parse {s!r}") from None


def _req(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"{where}.{key}: expected {kind}, got {type(val).__name__}")
    return val


# -- graphs -------------------------------------------------------------


def graph_to_json(g: MetricGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "genus": v.genus, "infinite": v.infinite} for v in g.vertices],
        "edges": [{"id": e.id, "ends": [e.tail, e.head], "length": rat(e.length)} for e in g.edges],
    }


def graph_from_json(obj: Any) -> MetricGraph:
    vs = []
    for i, v in enumerate(_req(obj, "vertices", list, "graph")):
        vid = _req(v, "id", str, f"vertices[{i}]")
        genus = v.get("genus", 0)
        if not isinstance(genus, int) or isinstance(genus, bool):
            raise SchemaError(f"vertices[{i}].genus: expected integer")
        inf = v.get("infinite", False)
        if not isinstance(inf, bool):
            raise SchemaError(f"vertices[{i}].infinite: expected boolean")
        vs.append(Vertex(vid, genus, inf))
    es = []
    for i, e in enumerate(_req(obj, "edges", list, "graph")):
        eid = _req(e, "id", str, f"edges[{i}]")
        ends = _req(e, "ends", list, f"edges[{i}]")
        if len(ends) != 2 or not all(isinstance(x, str) for x in ends):
            raise SchemaError(f"edges[{i}].ends: expected two vertex ids")
        ln = _req(e, "length", (str, int), f"edges[{i}]")
        length = INF if ln == "inf" else parse_rat(ln, f"edges[{i}].length")
        es.append(Edge(eid, ends[0], ends[1], length))
    return MetricGraph.build(vs, es)


# -- points and divisors --------------------------------------------------


def point_to_json(p: Point) -> dict:
    if p.vertex is not None:
        return {"vertex": p.vertex}
    return {"edge": p.edge, "offset": rat(p.offset)}


def point_from_json(obj: Any) -> Point:
    if isinstance(obj, dict) and "vertex" in obj:
        if not isinstance(obj["vertex"], str):
            raise SchemaError("point.vertex: expected string")
        return Point.at(obj["vertex"])
    if isinstance(obj, dict) and "edge" in obj:
        return Point.on(_req(obj, "edge", str, "point"), parse_rat(_req(obj, "offset", (str, int), "point")))
    raise SchemaError(f"point: expected {{'vertex'}} or {{'edge','offset'}}, got {obj!r}")


def divisor_to_json(D: Divisor) -> dict:
    return {"entries": [{"point": point_to_json(p), "coeff": c} for p, c in D.items()]}


def divisor_from_json(obj: Any) -> Divisor:
    entries = []
    for i, ent in enumerate(_req(obj, "entries", list, "divisor")):
        c = _req(ent, "coeff", int, f"entries[{i}]")
        if isinstance(c, bool):
            raise SchemaError(f"entries[{i}].coeff: expected integer")
        entries.append((point_from_json(_req(ent, "point", dict, f"entries[{i}]")), c))
    return Divisor(entries)


# -- functions ------------------------------------------------------------


def function_to_json(f: RationalFunction) -> dict:
    vals = {}
    for v in f.graph.vertices:
        x = f.value_at_vertex(v.id)
        vals[v.id] = x if isinstance(x, str) else rat(x)
    out = {"values": vals}
    slopes = {e: s for e, s in f.leg_slopes.items() if s}
    if slopes:
        out["slopes"] = slopes
    return out


def function_from_json(obj: Any, g: MetricGraph) -> RationalFunction:
    raw = _req(obj, "values", dict, "function")
    slopes = dict(obj.get("slopes", {}))
    vals = {}
    for v, x in raw.items():
        if v not in g.vertex:
            raise SchemaError(f"function: unknown vertex {v!r}")
        if g.vertex[v].infinite:
            (e,) = g.incidence[v]
            if x in (POS_INF, NEG_INF):
                s = slopes.get(e.id)
                if s is None:
                    raise SchemaError(f"function: infinite value at {v!r} needs a slope for edge {e.id!r}")
                if (s > 0) != (x == POS_INF) or s == 0:
                    raise SchemaError(f"function: slope {s} on {e.id!r} disagrees with value {x}")
            continue
        if x in (POS_INF, NEG_INF):
            raise SchemaError(f"function: infinite value at finite vertex {v!r}")
        vals[v] = parse_rat(x, f"values[{v}]")
    return RationalFunction(g, vals, slopes)


# -- morphisms ------------------------------------------------------------


def morphism_to_json(phi: HarmonicMorphism) -> dict:
    edges = {}
    for e in phi.source.edges:
        act = phi.edge_map[e.id]
        if isinstance(act, Contraction):
            edges[e.id] = {"contracted_to": act.vertex}
        else:
            edges[e.id] = {"image": act.image, "degree": act.degree, "reversed": act.reversed}
    return {
        "source": graph_to_json(phi.source),
        "target": graph_to_json(phi.target),
        "vertex_map": {v: phi.vertex_map[v] for v in phi.source.vertex},
        "edges": edges,
    }


def morphism_from_json(obj: Any) -> HarmonicMorphism:
    S = graph_from_json(_req(obj, "source", dict, "morphism"))
    T = graph_from_json(_req(obj, "target", dict, "morphism"))
    vm = _req(obj, "vertex_map", dict, "morphism")
    raw = _req(obj, "edges", dict, "morphism")
    emap = {}
    paths = False
    for e, a in raw.items():
        if not isinstance(a, dict):
            raise SchemaError(f"edges.{e}: expected object")
        if "contracted_to" in a:
            emap[e] = Contraction(a["contracted_to"])
        elif "path" in a:
            paths = True
            steps = tuple((s["edge"], bool(s.get("reversed", False))) for s in a["path"])
            emap[e] = PathImage(steps, _req(a, "degree", int, f"edges.{e}"))
        else:
            emap[e] = EdgeImage(_req(a, "image", str, f"edges.{e}"), _req(a, "degree", int, f"edges.{e}"),
                                bool(a.get("reversed", False)))
    # infinite source edges are stored with the finite end as tail; keep orientation flags consistent
    for e in S.edges:
        if e.id in raw and isinstance(emap.get(e.id), EdgeImage):
            src_raw = [x for x in obj["source"]["edges"] if x["id"] == e.id][0]["ends"]
            if src_raw[0] != e.tail:
                a = emap[e.id]
                emap[e.id] = EdgeImage(a.image, a.degree, not a.reversed)
    for e in T.edges:
        tgt_raw = [x for x in obj["target"]["edges"] if x["id"] == e.id][0]["ends"]
        if tgt_raw[0] != e.tail:
            for k, a in list(emap.items()):
                if isinstance(a, EdgeImage) and a.image == e.id:
                    emap[k] = EdgeImage(a.image, a.degree, not a.reversed)
    if paths:
        from .harmonic import refine_to_compatible
        return refine_to_compatible(S, T, vm, emap)
    return HarmonicMorphism(S, T, dict(vm), emap)


# -- queries and files ------------------------------------------------------


def load_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
