import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from builders import random_graph
from tropical_lift import corpus as C
from tropical_lift.chipfiring import BudgetExceeded
from tropical_lift.harmonic import validate_morphism
from tropical_lift.metric_graph import GraphError, MetricGraph
from tropical_lift.symmetry import (automorphisms, fixed_midpoints, hyperelliptic_involution,
                                    hyperelliptic_liftable, identity, is_hyperelliptic, quotient)


def _from_nx(G):
    return MetricGraph.build([str(v) for v in G.nodes], [(f"e{i}", str(a), str(b), 1)
                                                          for i, (a, b) in enumerate(G.edges)])


def _nx_count(G):
    return sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(G, G).isomorphisms_iter())


@pytest.mark.parametrize("G", [nx.complete_graph(4), nx.petersen_graph(), nx.complete_bipartite_graph(3, 3),
                               nx.cycle_graph(5)], ids=["K4", "petersen", "K33", "C5"])
def test_counts_match_networkx(G):
    assert len(automorphisms(_from_nx(G))) == _nx_count(G)


def test_theta_and_loops():
    assert len(automorphisms(C.theta((1, 1, 1)))) == 12
    assert len(automorphisms(C.theta((1, 2, 3)))) == 2
    assert len(automorphisms(C.loop(1))) == 2
    assert len(automorphisms(C.luo_g7())) == 1296


@given(st.integers(0, 10**6))
def test_group_closed(seed):
    g = random_graph(random.Random(seed), 3, 4, lengths=(1, 2))
    H = automorphisms(g)
    assert H and any(h.is_identity for h in H)
    Hs = set(H)
    for a in H[:6]:
        for b in H[:6]:
            assert a.then(b) in Hs


def test_budget():
    with pytest.raises(BudgetExceeded):
        automorphisms(C.luo_g7(), budget=100)


def test_fixed_midpoints_theta():
    g = C.theta((1, 2, 3))
    W = fixed_midpoints(g, automorphisms(g))
    assert len(W) == 3 and all(v == (2, 1) for v in W.values())


@pytest.mark.parametrize("g", [C.theta((1, 1, 1)), C.theta((1, 2, 3)), C.loop(2), C.glasses(), C.luo_g7()],
                         ids=["theta111", "theta123", "loop", "glasses", "luo"])
def test_quotient_is_harmonic(g):
    H = automorphisms(g)
    q = quotient(g, H)
    rep = validate_morphism(q.projection)
    assert rep.ok, rep.problems
    assert rep.degree == len(H)


def test_quotient_tame_check():
    g = C.theta((1, 2, 3))
    with pytest.raises(GraphError):
        quotient(g, automorphisms(g), char=2)


@pytest.mark.parametrize("kind", C.GENUS2_TYPES)
def test_genus_two_hyperelliptic(kind):
    g = C.genus2(kind)
    h = hyperelliptic_involution(g)
    assert h.involution is not None and h.candidates == 1
    assert is_hyperelliptic(g).weighted_rank == 1
    if h.graph.edges:
        q = quotient(h.graph, [identity(h.graph), h.involution])
        rep = validate_morphism(q.projection)
        assert rep.ok and rep.degree == 2 and rep.finite and q.graph.is_tree()


def test_luo_not_hyperelliptic():
    assert not is_hyperelliptic(C.luo_g7()).hyperelliptic


def test_genus_one_rejected():
    with pytest.raises(GraphError):
        hyperelliptic_involution(C.loop(1))


@pytest.mark.parametrize("kappa", range(1, 7))
@pytest.mark.parametrize("gp", range(3))
def test_kappa_bridge(kappa, gp):
    if kappa == 1 and gp == 0:
        return
    r = hyperelliptic_liftable(C.kappa_bridge(kappa, gp))
    assert r.liftable == (2 * gp >= kappa - 2)
    assert r.consistent
