"""Groups generated by a maximal cycle C of order p^n and a normalizing monomial A.

Decides whether every element is similar to a permutation matrix and, when it
is, builds and checks an explicit conjugation to a permutation group.
"""

from __future__ import annotations

from ._accel import backend
from .certify import Certificate, build_basis_E, certify_group, charpoly_Vstar_closed_form, verify_section3
from .monomial import CycleFactors, MonoMatrix, RootExp
from .numtheory import INF, OrbitPartition, Residue, UnitOrderDecomp
from .permsim import is_permutation_like_element, is_permutation_like_group
from .structure import Element, GroupSpec

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Certificate",
    "CycleFactors",
    "Element",
    "GroupSpec",
    "MonoMatrix",
    "OrbitPartition",
    "Residue",
    "RootExp",
    "UnitOrderDecomp",
    "backend",
    "build_basis_E",
    "certify_group",
    "charpoly_Vstar_closed_form",
    "is_permutation_like_element",
    "is_permutation_like_group",
    "verify_section3",
]
