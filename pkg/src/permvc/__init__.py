"""Permutation VC-dimension toolkit: (0,1)-matrix patterns, formations,
Davenport-Schinzel sequences, the inverse Ackermann hierarchy and
brute-force oracles for small extremal values."""

from .core import (
    BlockedSequence,
    FormatError,
    FormationWitness,
    InvariantError,
    Matrix01,
    PermFamily,
    Permutation,
    RowPartition,
    parse_family,
    parse_matrix,
    parse_sequence,
    perm_to_matrix,
    matrix_to_perm,
    serialize_family,
    serialize_matrix,
    serialize_sequence,
)
from .patterns import contains_pattern, ds_matrix, find_formation, is_ds_sequence, mst, sparsify, split_formation
from .vcdim import compress_family, fullness, reduction_step, vc_dimension
from .constructions import build_family, flattenings, gen_ds3, j2_expand, phi, smt, tile_and_pad

__version__ = "0.1.0"
