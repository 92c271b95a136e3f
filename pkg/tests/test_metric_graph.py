from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from builders import random_graph
from tropical_lift import corpus as C
from tropical_lift.metric_graph import (INF, GraphError, MetricGraph, Point, canonical_divisor,
                                        elementary_modification, genus_data, minimize, refine_at,
                                        uniform_subdivision, validate_graph)
import random


def test_infinite_edge_stored_with_finite_tail():
    g = MetricGraph.build(["a", ("z", 0, True)], [("e", "z", "a", "inf")])
    assert g.edge["e"].tail == "a" and g.edge["e"].length is INF


def test_point_normalization():
    g = C.theta((1, 2, 3))
    assert g.point("e1", 0) == Point.at(g.edge["e1"].tail)
    assert g.point("e1", 2) == Point.at(g.edge["e1"].head)
    assert g.point("e1", F(1, 2)) == Point.on("e1", F(1, 2))
    with pytest.raises(GraphError):
        g.point("e1", 3)


@pytest.mark.parametrize("g,problem", [
    (MetricGraph.build(["a", "b"], [("e", "a", "b", -1)]), "length"),
    (MetricGraph.build(["a", "b"], []), "connected"),
    (MetricGraph.build(["a"], [("e", "a", "x", 1)]), "x"),
])
def test_validate_reports(g, problem):
    rep = validate_graph(g)
    assert not rep.ok and any(problem in p for p in rep.problems)


@pytest.mark.parametrize("name,genus", [("glasses", 2), ("g3", 3), ("a1", 9), ("a3", 9), ("g27", 27), ("luo_g7", 7)])
def test_corpus_genera(name, genus):
    g = C.BY_NAME[name].build()
    assert validate_graph(g).ok
    assert genus_data(g).genus == genus


@given(st.integers(0, 10**6))
def test_canonical_degree(seed):
    g = random_graph(random.Random(seed), genus=True)
    assert canonical_divisor(g).degree == 2 * g.genus() - 2


@given(st.integers(0, 10**6), st.data())
def test_refine_restore_roundtrip(seed, data):
    rng = random.Random(seed)
    g = random_graph(rng)
    if not g.edges:
        return
    pts = []
    for _ in range(3):
        e = rng.choice(g.edges)
        pts.append(g.point(e.id, e.length * F(rng.randint(0, 6), 6)))
    ref = refine_at(g, pts)
    assert ref.graph.total_length() == g.total_length()
    assert ref.graph.genus() == g.genus()
    for p in pts:
        q = ref.relocate(p)
        assert q.vertex is not None
        assert ref.restore(q) == g.normalize(p)


def test_minimize():
    g = MetricGraph.build(["a", "b", "c", "leaf"], [
        ("l", "a", "a", 2), ("x", "a", "b", 1), ("y", "b", "c", 1), ("z", "c", "a", 1), ("t", "c", "leaf", 5)])
    m = minimize(g)
    assert m.genus() == g.genus() == 2
    assert "leaf" not in m.vertex and all(m.valence(v) >= 3 or m.genus_of(v) > 0 for v in m.vertex)
    assert minimize(m) == m


def test_minimize_keeps_positive_genus_leaf():
    g = MetricGraph.build([("a", 1), ("b", 1)], [("e", "a", "b", 1)])
    assert minimize(g).vertex.keys() == {"a", "b"}


def test_elementary_modification_retracts():
    g = C.glasses()
    mod = elementary_modification(g, Point.at("p"))
    assert mod.graph.genus() == g.genus()
    for v in mod.graph.vertex:
        assert mod.retract(Point.at(v)) in (Point.at("p"), Point.at(v))


def test_subdivision_keeps_loop_midpoints():
    sub = uniform_subdivision(C.loop(1))
    assert len(sub.model_indices) == 2
    assert sub.n >= 2
