"""Command line front end.

Exit codes: 0 success, 1 schema/validation error, 2 semantic negative
(not harmonic, not liftable, ...), 3 resource budget, 4 I/O.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import corpus as corpus_mod
from . import io
from .chipfiring import BudgetExceeded
from .divisor_theory import (equivalence_witness, rank, reduce_divisor, subdivided_rank, wedge_rank)
from .harmonic import (MorphismError, fiber, local_profiles, pullback, pushforward, ramification,
                       validate_morphism)
from .hurwitz import (Budget, HurwitzQuery, compute_R, hurwitz_number, minimal_source_genus,
                      pad_profiles)
from .lifting import (UNKNOWN, effective_equivalence_witness, enrich_genus, liftability_certificate,
                      polynomial_like_check, weak_resolution)
from .metric_graph import GraphError, MetricGraph, Point, genus_data, minimize, validate_graph
from .symmetry import (GraphAutomorphism, automorphisms, hyperelliptic_liftable, is_hyperelliptic,
                       quotient)

OK, INVALID, NEGATIVE, BUDGET, IO = 0, 1, 2, 3, 4


class Negative(Exception):
    """A well-formed question whose answer is 'no'; carries the JSON detail."""

    def __init__(self, payload: dict):
        super().__init__(payload.get("reason", "negative"))
        self.payload = payload


# -- encoding -------------------------------------------------------------


def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return io.rat(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def auto_to_json(a: GraphAutomorphism) -> dict:
    return {"vertex_perm": dict(a.vertex_perm),
            "edge_perm": {e: {"image": f, "reversed": r} for e, (f, r) in a.edge_perm.items()}}


def certificate_to_json(c) -> dict:
    return {
        "verdict": c.verdict,
        "char": c.char,
        "reasons": list(c.reasons),
        "vertices": [{"vertex": r.vertex, "d": r.d, "genus": r.genus, "target_genus": r.target_genus,
                      "profiles": [list(m) for m in r.profiles], "hurwitz": _plain(r.hurwitz),
                      "nonempty": r.nonempty} for r in c.vertices],
    }


# -- parsing --------------------------------------------------------------


def parse_profiles(text: str) -> tuple[tuple[int, ...], ...]:
    """'2,2;2,2;3,1' -> ((2,2),(2,2),(3,1)), each partition sorted decreasingly."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            parts = [int(x) for x in chunk.split(",")]
        except ValueError:
            raise io.SchemaError(f"bad profile {chunk!r}") from None
        out.append(tuple(sorted(parts, reverse=True)))
    return tuple(out)


def parse_point(g: MetricGraph, text: str) -> Point:
    """A vertex id, or 'edge@offset'."""
    if text in g.vertex:
        return Point.at(text)
    edge, sep, off = text.rpartition("@")
    if not sep or edge not in g.edge:
        raise io.SchemaError(f"unknown point {text!r}")
    return g.point(edge, io.parse_rat(off, "offset"))


def _graph(path) -> MetricGraph:
    return io.graph_from_json(io.load_json(path))


def _divisor(path, g: MetricGraph):
    D = io.divisor_from_json(io.load_json(path))
    for p in D:
        if p.vertex is not None and p.vertex not in g.vertex or p.edge is not None and p.edge not in g.edge:
            raise io.SchemaError(f"divisor point {p} is not on the graph")
    return g.normalize_divisor(D)


def _morphism(path):
    return io.morphism_from_json(io.load_json(path))


def _hbudget(args) -> Budget | None:
    return Budget(work=args.budget) if args.budget else None


def _query(args) -> HurwitzQuery:
    if getattr(args, "query", None):
        obj = io.load_json(args.query)
        if not isinstance(obj, dict):
            raise io.SchemaError("query: expected an object")
        args.char = obj.get("char", args.char)
        return HurwitzQuery(obj["d"], obj.get("g", 0), obj.get("gprime", 0),
                            tuple(tuple(sorted(m, reverse=True)) for m in obj.get("profiles", [])))
    if args.d is None:
        raise io.SchemaError("need -d or --query")
    return HurwitzQuery(args.d, args.g, args.gprime, parse_profiles(args.profiles or ""))


# -- commands -------------------------------------------------------------


def cmd_graph(args):
    g = _graph(args.graph)
    if args.action == "validate":
        rep = validate_graph(g)
        out = {"ok": rep.ok, "problems": list(rep.problems)}
        if not rep.ok:
            print(io.dump_json(out))
            return INVALID
        return out
    if args.action == "genus":
        gd = genus_data(g)
        return {"first_betti": gd.first_betti, "genus": gd.genus, "canonical": io.divisor_to_json(gd.canonical)}
    return io.graph_to_json(minimize(g))


def cmd_divisor(args):
    g = _graph(args.graph)
    D = _divisor(args.divisor, g)
    if args.action == "rank":
        res = (subdivided_rank if args.subdivided else rank)(g, D, args.budget)
        return {"rank": res.rank, "witness": io.divisor_to_json(res.witness)}
    if args.action == "reduce":
        q = parse_point(g, args.base) if args.base else None
        return {"reduced": io.divisor_to_json(reduce_divisor(g, D, q))}
    if args.action == "equiv":
        if not args.other:
            raise io.SchemaError("equiv needs a second divisor")
        D2 = _divisor(args.other, g)
        f = equivalence_witness(g, D, D2)
        if f is None:
            raise Negative({"equivalent": False})
        return {"equivalent": True, "function": io.function_to_json(f)}
    if not args.cut:
        raise io.SchemaError("wedge needs --cut")
    w = wedge_rank(g, D, parse_point(g, args.cut), args.side, args.budget)
    return {"rank": w.rank, "eta": {str(m): v for m, v in w.eta.items()}}


def cmd_morphism(args):
    phi = _morphism(args.morphism)
    a = args.action
    if a == "check":
        rep = validate_morphism(phi)
        out = {"ok": rep.ok, "problems": list(rep.problems), "degree": rep.degree, "finite": rep.finite,
               "surjective": rep.surjective, "local_degrees": dict(rep.local_degrees)}
        if not rep.ok:
            raise Negative(out)
        return out
    if a == "ramification":
        r = ramification(phi)
        return {"R": io.divisor_to_json(r.R), "r": dict(r.r), "effective": r.effective,
                "generically_etale": r.generically_etale, "etale": r.etale, "finite": r.finite,
                "riemann_hurwitz": r.riemann_hurwitz}
    if a == "fiber":
        if not args.at:
            raise io.SchemaError("fiber needs --at")
        return {"fiber": io.divisor_to_json(fiber(phi, parse_point(phi.target, args.at)))}
    if a in ("pullback", "pushforward"):
        if not args.divisor:
            raise io.SchemaError(f"{a} needs a divisor file")
        if a == "pullback":
            return {"divisor": io.divisor_to_json(pullback(phi, _divisor(args.divisor, phi.target)))}
        return {"divisor": io.divisor_to_json(pushforward(phi, _divisor(args.divisor, phi.source)))}
    if a == "profiles":
        if not args.vertex:
            raise io.SchemaError("profiles needs --vertex")
        return {"vertex": args.vertex, "profiles": [list(m) for m in local_profiles(phi, args.vertex)]}
    res = weak_resolution(phi)
    return {"morphism": io.morphism_to_json(res.morphism), "trace": list(res.trace)}


def cmd_hurwitz(args):
    q = _query(args)
    if args.action == "R":
        r = compute_R(q)
        return {"R": r.R, "parity_sum": r.parity_sum, "parity_ok": r.parity_ok}
    if args.action == "compute":
        res = hurwitz_number(q, _hbudget(args))
        return {"value": io.rat(res.value), "raw_count": res.raw_count, "R": res.R,
                "witness": [list(p) for p in res.witness] if res.witness else None}
    if args.action == "mingenus":
        try:
            m = minimal_source_genus(q.d, q.g, q.profiles, args.char, _hbudget(args))
        except RuntimeError as exc:
            if isinstance(exc, BudgetExceeded):
                raise
            raise Negative({"reason": str(exc)}) from None
        return {"gprime": m.gprime, "bound": io.rat(m.bound), "value": io.rat(m.result.value)}
    p = pad_profiles(q.d, q.gprime, q.profiles, args.char, _hbudget(args))
    return {"d": p.d, "profiles": [list(m) for m in p.profiles], "value": io.rat(p.result.value)}


def cmd_lift(args):
    if args.action == "effective-equiv":
        g = _graph(args.input)
        if not args.divisor:
            raise io.SchemaError("effective-equiv needs a divisor file")
        D = _divisor(args.divisor, g)
        w = effective_equivalence_witness(g, D)
        out = {"ok": w.ok, "E": io.divisor_to_json(w.E), "plus": io.divisor_to_json(w.plus),
               "minus": io.divisor_to_json(w.minus), "morphism": io.morphism_to_json(w.morphism)}
        if not w.ok:
            raise Negative(out)
        return out
    phi = _morphism(args.input)
    if args.action == "certify":
        c = liftability_certificate(phi, args.char, _hbudget(args))
        out = certificate_to_json(c)
        if not c.liftable and c.verdict != UNKNOWN:
            raise Negative(out)
        return out
    if args.action == "enrich":
        e = enrich_genus(phi, char=args.char, budget=_hbudget(args))
        return {"genus": dict(e.genus), "certificate": certificate_to_json(e.certificate),
                "morphism": io.morphism_to_json(e.morphism)}
    p = polynomial_like_check(phi, args.char)
    out = {"liftable": p.liftable, "end": p.end, "reasons": list(p.reasons)}
    if not p.liftable:
        raise Negative(out)
    return out


def cmd_symmetry(args):
    g = _graph(args.graph)
    if args.action == "autos":
        H = automorphisms(g, args.budget)
        return {"order": len(H), "elements": [auto_to_json(a) for a in H]}
    if args.action == "quotient":
        q = quotient(g, automorphisms(g, args.budget), args.char)
        return {"order": q.order, "graph": io.graph_to_json(q.graph),
                "projection": io.morphism_to_json(q.projection)}
    if args.action == "hyperelliptic":
        h = is_hyperelliptic(g, args.budget)
        out = {"hyperelliptic": h.hyperelliptic,
               "involution": auto_to_json(h.involution) if h.involution else None,
               "weighted_rank": h.weighted_rank}
        if not h.hyperelliptic:
            raise Negative(out)
        return out
    try:
        r = hyperelliptic_liftable(g, args.budget)
    except GraphError as exc:
        if "not hyperelliptic" in str(exc):
            raise Negative({"liftable": False, "reason": str(exc)}) from None
        raise
    out = {"liftable": r.liftable, "consistent": r.consistent,
           "vertices": [{"vertex": x.vertex, "genus": x.genus, "kappa": x.kappa, "bridges": x.bridges,
                         "ok": x.ok} for x in r.records]}
    if not r.liftable:
        raise Negative(out)
    return out


def cmd_corpus(args):
    if args.action == "list":
        return {"entries": corpus_mod.corpus()}
    if not args.directory:
        raise io.SchemaError("export needs a directory")
    paths = corpus_mod.write_all(Path(args.directory))
    return {"written": [str(p) for p in paths]}


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="cap on enumeration work")
    common.add_argument("--char", type=int, default=0, help="residue characteristic (0 or a prime)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    ap = argparse.ArgumentParser(prog="tropical-lift", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="group", required=True)

    p = sub.add_parser("graph", parents=[common])
    p.add_argument("action", choices=("validate", "genus", "minimize"))
    p.add_argument("graph")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("divisor", parents=[common])
    p.add_argument("action", choices=("rank", "reduce", "equiv", "wedge"))
    p.add_argument("graph")
    p.add_argument("divisor")
    p.add_argument("other", nargs="?")
    p.add_argument("--base")
    p.add_argument("--cut")
    p.add_argument("--side")
    p.add_argument("--subdivided", action="store_true", help="rank on the full uniform subdivision")
    p.set_defaults(fn=cmd_divisor)

    p = sub.add_parser("morphism", parents=[common])
    p.add_argument("action", choices=("check", "ramification", "fiber", "pullback", "pushforward",
                                      "profiles", "resolve"))
    p.add_argument("morphism")
    p.add_argument("divisor", nargs="?")
    p.add_argument("--at")
    p.add_argument("--vertex")
    p.set_defaults(fn=cmd_morphism)

    p = sub.add_parser("hurwitz", parents=[common])
    p.add_argument("action", choices=("compute", "R", "mingenus", "pad"))
    p.add_argument("-d", type=int)
    p.add_argument("-g", type=int, default=0)
    p.add_argument("--gprime", type=int, default=0)
    p.add_argument("-p", "--profiles", default="")
    p.add_argument("--query", help="JSON file with d, g, gprime, profiles, char")
    p.set_defaults(fn=cmd_hurwitz)

    p = sub.add_parser("lift", parents=[common])
    p.add_argument("action", choices=("certify", "enrich", "poly-like", "effective-equiv"))
    p.add_argument("input", help="morphism file (graph file for effective-equiv)")
    p.add_argument("divisor", nargs="?")
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("symmetry", parents=[common])
    p.add_argument("action", choices=("autos", "quotient", "hyperelliptic", "hyperelliptic-liftable"))
    p.add_argument("graph")
    p.set_defaults(fn=cmd_symmetry)

    p = sub.add_parser("corpus", parents=[common])
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("directory", nargs="?")
    p.set_defaults(fn=cmd_corpus)
    return ap


def _emit(obj: dict, fmt: str, stream) -> None:
    if fmt == "json":
        print(io.dump_json(_plain(obj)), file=stream)
        return
    for k, v in _plain(obj).items():
        print(f"{k}: {v if not isinstance(v, (dict, list)) else json.dumps(v)}", file=stream)


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out = args.fn(args)
    except Negative as neg:
        _emit(neg.payload, args.format, sys.stdout)
        return NEGATIVE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except (io.SchemaError, GraphError, MorphismError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return IO
    if isinstance(out, int):
        return out
    _emit(out, args.format, sys.stdout)
    return OK


def main() -> None:
    sys.exit(run())
