"""Exact lattice and Lefschetz computations for automorphisms of K3 surfaces."""
from .errors import DomainError
from .expr import ExprSyntaxError, parse, pretty
from .lattice import Lattice, LatticeInvariants, discriminant_form

__version__ = "0.1.0"

__all__ = ["DomainError", "ExprSyntaxError", "Lattice", "LatticeInvariants",
           "discriminant_form", "parse", "pretty", "__version__"]
