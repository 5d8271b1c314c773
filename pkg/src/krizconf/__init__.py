"""Bigraded Betti numbers of configuration spaces of an elliptic curve.

Submodules
----------
ring        graded ring presentations and the diagonal class
kriz        the Kriz model in the monotone-forest basis and its differential
linalg      sparse integer matrices and certified modular ranks
partitions  partitions, Frobenius coordinates, oysters and labelled partitions
binomial    polynomials in the binomial basis
cohomology  rank engine, tables, binomial coefficients and Betti polynomials
checks      invariant suites
cli         command-line front end
"""

from .binomial import BinomialPolynomial, fit_binomial
from .cohomology import (BigradedTable, Engine, betti_polynomials, cohom_dims, deconvolve_by_C,
                         graded_coefficients, primed_coefficients, verify_strictness)
from .ring import elliptic_curve_ring, genus_two_ring, load_ring, point_ring

__version__ = "0.1.0"

__all__ = [
    "BigradedTable", "BinomialPolynomial", "Engine", "betti_polynomials", "cohom_dims",
    "deconvolve_by_C", "elliptic_curve_ring", "fit_binomial", "genus_two_ring",
    "graded_coefficients", "load_ring", "point_ring", "primed_coefficients", "verify_strictness",
]
