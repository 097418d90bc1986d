"""Quasitoric manifolds and small covers over dual cyclic polytopes.

Combinatorics of the polytopes, enumeration of characteristic matrices up to
equivalence, connected-sum decompositions, cohomology rings and graded ring
isomorphism tests.
"""

from .charmat import (
    CharMatrix,
    RealCharMatrix,
    canonical_form,
    enumerate_integer,
    enumerate_real,
    fiber_over,
    is_characteristic,
    orbits,
)
from .cohomology import betti, pairing_table, presentation
from .isomorphism import distinguish_all, iso_over_Z_bounded, iso_over_Zk
from .polytope import CombinatorialPolytope, dual_cyclic, polygon, simplex

__version__ = "0.1.0"

__all__ = [
    "CharMatrix",
    "CombinatorialPolytope",
    "RealCharMatrix",
    "betti",
    "canonical_form",
    "distinguish_all",
    "dual_cyclic",
    "enumerate_integer",
    "enumerate_real",
    "fiber_over",
    "is_characteristic",
    "iso_over_Z_bounded",
    "iso_over_Zk",
    "orbits",
    "pairing_table",
    "polygon",
    "presentation",
    "simplex",
]
