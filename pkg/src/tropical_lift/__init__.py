"""Computations with tropical curves: divisors, harmonic morphisms, Hurwitz numbers, lifting."""
from .divisor_theory import (RationalFunction, equivalence_witness, is_linearly_equivalent, principal_divisor,
                             rank, reduce_divisor, wedge_rank, weighted_rank)
from .harmonic import (Contraction, EdgeImage, HarmonicMorphism, MorphismError, fiber, fibers_equivalent_check,
                       local_profiles, pullback, pushforward, ramification, validate_morphism)
from .hurwitz import HurwitzQuery, hurwitz_number, minimal_source_genus, pad_profiles
from .lifting import (effective_equivalence_witness, enrich_genus, liftability_certificate,
                      polynomial_like_check, weak_resolution)
from .metric_graph import INF, Divisor, GraphError, MetricGraph, Point, genus_data, minimize, validate_graph
from .symmetry import automorphisms, hyperelliptic_involution, hyperelliptic_liftable, is_hyperelliptic, quotient

__all__ = [
    "INF", "Contraction", "Divisor", "EdgeImage", "GraphError", "HarmonicMorphism", "HurwitzQuery", "MetricGraph",
    "MorphismError", "Point", "RationalFunction", "automorphisms", "effective_equivalence_witness", "enrich_genus",
    "equivalence_witness", "fiber", "fibers_equivalent_check", "genus_data", "hurwitz_number",
    "hyperelliptic_involution", "hyperelliptic_liftable", "is_hyperelliptic", "is_linearly_equivalent",
    "liftability_certificate", "local_profiles", "minimal_source_genus", "minimize", "pad_profiles",
    "polynomial_like_check", "principal_divisor", "pullback", "pushforward", "quotient", "ramification", "rank",
    "reduce_divisor", "validate_graph", "validate_morphism", "wedge_rank", "weak_resolution", "weighted_rank",
]
__version__ = "0.1.0"
