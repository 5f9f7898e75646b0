"""Enumeration of left Bruck loops, commutative automorphic loops and
involutory latin quandles of odd prime power order via central extensions."""

from .errors import (
    InternalConsistencyError,
    LoopError,
    NonPowerAssociativeError,
    PreconditionError,
    RefusalError,
    UnsupportedStructureError,
)
from .tables import (
    LoopTable,
    QuandleTable,
    abelian_group,
    cyclic_group,
    dihedral_quandle,
    direct_product,
    elementary_abelian,
)

__all__ = [
    "InternalConsistencyError",
    "LoopError",
    "LoopTable",
    "NonPowerAssociativeError",
    "PreconditionError",
    "QuandleTable",
    "RefusalError",
    "UnsupportedStructureError",
    "abelian_group",
    "cyclic_group",
    "dihedral_quandle",
    "direct_product",
    "elementary_abelian",
]
