"""Finite and Z-periodic cube complexes: validation, links, walls, medians,
loop contraction, and minimal displacement sets of automorphisms."""
from .complex import CubeComplex, build_complex, validate
from .io import parse, serialize
from .isometry import FiniteAutomorphism, ShiftAutomorphism, classify, min_set
from .periodic import PeriodicComplex, build_periodic

__all__ = ["CubeComplex", "build_complex", "validate", "parse", "serialize",
           "FiniteAutomorphism", "ShiftAutomorphism", "classify", "min_set",
           "PeriodicComplex", "build_periodic"]
__version__ = "0.1.0"
