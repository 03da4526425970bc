"""Exact checks for quiver moment maps: representation types, dimension
bounds, jet point counts over prime fields and commutator counts in small
matrix groups."""
from __future__ import annotations

__version__ = "0.1.0"

from .quiver import (
    DimensionMismatchError,
    DomainError,
    Quiver,
    build_class_c_quiver,
    double_quiver,
    euler_form,
    p_loops,
    p_value,
    sym_form,
)
from .reptypes import RepType, enumerate_rep_types, local_quiver

__all__ = [
    "__version__",
    "DimensionMismatchError",
    "DomainError",
    "Quiver",
    "RepType",
    "build_class_c_quiver",
    "double_quiver",
    "enumerate_rep_types",
    "euler_form",
    "local_quiver",
    "p_loops",
    "p_value",
    "sym_form",
]
