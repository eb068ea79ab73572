"""Combinatorics of compactified Picard varieties over the moduli of stable curves."""

from picard_strata.balance import (
    BalanceClass, BasicBounds, Multidegree, basic_bounds, classify, enumerate_balanced,
    reflect_twist, twist,
)
from picard_strata.degree_class import (
    DegreeClassGroup, TwisterLattice, class_group, same_class, semibalanced_representative,
    twister_lattice,
)
from picard_strata.dual_graph import (
    DualGraph, StabilityClass, Subcurve, arithmetic_genus, classify_stability,
    enumerate_connected_proper_subcurves, stable_model, subcurve_invariants,
)
from picard_strata.errors import InvariantViolation, ValidationError
from picard_strata.strata import (
    GcdInvariant, Method, StratumLattice, VineGenerator, divisor_lattice,
    enumerate_special_vine_generators, gcd_invariant, is_d_general, stratum_containment,
)

__all__ = [
    "BalanceClass", "BasicBounds", "DegreeClassGroup", "DualGraph", "GcdInvariant",
    "InvariantViolation", "Method", "Multidegree", "StabilityClass", "StratumLattice",
    "Subcurve", "TwisterLattice", "ValidationError", "VineGenerator", "arithmetic_genus",
    "basic_bounds", "class_group", "classify", "classify_stability", "divisor_lattice",
    "enumerate_balanced", "enumerate_connected_proper_subcurves",
    "enumerate_special_vine_generators", "gcd_invariant", "is_d_general", "reflect_twist",
    "same_class", "semibalanced_representative", "stable_model", "stratum_containment",
    "subcurve_invariants", "twist", "twister_lattice",
]
