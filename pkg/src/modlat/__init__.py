"""Decision procedures for subcategories of finitely generated modules.

Two computable backends (the integers; monomial quotients of a polynomial
ring) with exact integer linear algebra underneath, criterion maps between
subcategory descriptions and spectrum subsets, Koszul-complex homology, and
a brute-force closure oracle for desk-scale verification.
"""

from .intlinalg import IntMatrix, SmithDecomposition, snf
from .monomials import MonomialIdeal, MonomialModule
from .spectrum import PrimeId, SpecSubset, Z_BACKEND, monomial_backend
from .zmodules import IdealZ, ZModule, ZModuleMap

__all__ = [
    "IntMatrix",
    "SmithDecomposition",
    "snf",
    "MonomialIdeal",
    "MonomialModule",
    "PrimeId",
    "SpecSubset",
    "Z_BACKEND",
    "monomial_backend",
    "IdealZ",
    "ZModule",
    "ZModuleMap",
]
