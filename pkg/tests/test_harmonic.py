import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from builders import random_contracting_morphism
from tropical_lift import corpus as C
from tropical_lift.harmonic import (EdgeImage, HarmonicMorphism, MorphismError, contracted_set, fiber,
                                    fibers_equivalent_check, local_profiles, pullback, pushforward,
                                    ramification, refine_morphism, require_harmonic, validate_morphism)
from tropical_lift.metric_graph import Divisor, Point

MORPHISMS = [e for e in C.ENTRIES if e.kind == "morphism"]
DEGREES = {"star_map": 4, "loop_double_cover": 2, "theta_fold": 2, "cycle_fold": 2, "segment_power": 3,
           "polynomial_like": 3, "contracted_tail": 2, "genus_drop": 2, "cycle_contraction": 1}


@pytest.mark.parametrize("entry", MORPHISMS, ids=lambda e: e.name)
def test_corpus_morphisms_harmonic(entry):
    phi = entry.build()
    rep = validate_morphism(phi)
    assert rep.ok, rep.problems
    assert rep.degree == DEGREES[entry.name]
    assert ramification(phi).riemann_hurwitz


def test_star_profiles():
    phi = C.star_map()
    assert sorted(local_profiles(phi, "c'")) == [(2, 2), (2, 2), (3, 1)]


def test_ramification_flags():
    r = ramification(C.genus_drop())
    assert not r.effective and min(r.r.values()) == -2
    r = ramification(C.contracted_tail())
    assert not r.finite
    assert ramification(C.loop_double_cover()).etale


def test_non_harmonic_detected():
    phi = C.theta_fold()
    e = next(iter(phi.edge_map))
    a = phi.edge_map[e]
    bad = HarmonicMorphism(phi.source, phi.target, phi.vertex_map,
                           {**phi.edge_map, e: EdgeImage(a.image, a.degree + 1, a.reversed)})
    assert not validate_morphism(bad).ok
    with pytest.raises(MorphismError):
        require_harmonic(bad)


def test_contracted_set():
    pieces = contracted_set(C.cycle_contraction())
    assert len(pieces) == 1 and pieces[0].first_betti() == 1


@pytest.mark.parametrize("entry", MORPHISMS, ids=lambda e: e.name)
def test_fiber_degree(entry):
    phi = entry.build()
    rep = validate_morphism(phi)
    if not rep.finite:
        return
    T = phi.target
    for e in T.finite_edges:
        assert fiber(phi, T.point(e.id, e.length / 3)).degree == rep.degree


@given(st.integers(0, 10**6))
def test_push_pull(seed):
    rng = random.Random(seed)
    phi = rng.choice([C.star_map, C.theta_fold, C.cycle_fold, C.polynomial_like])()
    d = validate_morphism(phi).degree
    T = phi.target
    e = rng.choice(T.finite_edges)
    D = Divisor([(T.point(e.id, e.length * F(rng.randint(0, 4), 4)), rng.randint(-2, 2)),
                 (Point.at(rng.choice(T.finite_vertices)), rng.randint(-2, 2))])
    assert pushforward(phi, pullback(phi, D)) == T.normalize_divisor(D * d)


@given(st.integers(0, 10**6))
def test_random_contractions_are_harmonic(seed):
    phi = random_contracting_morphism(random.Random(seed))
    assert validate_morphism(phi).ok
    assert ramification(phi).riemann_hurwitz


def test_refine_morphism_keeps_harmonic():
    phi = C.theta_fold()
    T = phi.target
    e = T.edges[0]
    psi, rs, rt = refine_morphism(phi, [T.point(e.id, e.length / 2)])
    assert rt.relocate(T.point(e.id, e.length / 2)).vertex is not None
    assert validate_morphism(psi).ok and validate_morphism(psi).degree == 2


def test_fibers_equivalent_on_star():
    phi = C.star_map()
    T = phi.target
    a, b = T.edges[0], T.edges[-1]
    fe = fibers_equivalent_check(phi, T.point(a.id, 1), T.point(b.id, F(7, 3)))
    assert fe.ok
