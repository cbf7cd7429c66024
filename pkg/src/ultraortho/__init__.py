"""Ultrametric orthogonality over discrete valued fields with finite residue
field, and exact small-parameter extremal set sizes."""

from .gf import FieldSpec, field_of_order, gf_make
from .valued import ValuedFieldSpec, laurent, padic, parse_elem
from .linalg_k import VectorK, SubspaceK, parse_vector, pair_orthogonal, set_orthogonal
from .extremal import solve, ExtremalResult

__version__ = "0.1.0"

__all__ = [
    "FieldSpec", "field_of_order", "gf_make",
    "ValuedFieldSpec", "laurent", "padic", "parse_elem",
    "VectorK", "SubspaceK", "parse_vector", "pair_orthogonal", "set_orthogonal",
    "solve", "ExtremalResult",
]
