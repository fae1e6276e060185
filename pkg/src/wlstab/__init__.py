"""Coherent closure of colored complete directed graphs (Weisfeiler-Leman stabilization)."""

from .core import (
    ColorMatrix,
    NotStableError,
    ShapeError,
    StableResult,
    StructureConstants,
    canonical_form,
    cells,
    is_automorphism,
    normalize,
    same_partition,
)
from .cli import closure
from .degree import preprocess_recolor, total_degree_partition
from .oracle import structure_constants, symbolic_closure, verify_coherent
from .stabcol import stabcol_closure
from .stabil import stabil_closure

__all__ = [
    "ColorMatrix",
    "NotStableError",
    "ShapeError",
    "StableResult",
    "StructureConstants",
    "canonical_form",
    "cells",
    "closure",
    "is_automorphism",
    "normalize",
    "preprocess_recolor",
    "same_partition",
    "stabcol_closure",
    "stabil_closure",
    "structure_constants",
    "symbolic_closure",
    "total_degree_partition",
    "verify_coherent",
]
