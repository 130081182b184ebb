"""Permutation decoding of polar codes.

Sort-free permutation decoder with an LLR codeword metric, an SCL
baseline, GA construction, permutation-set and orbit-based frozen-set
optimizers, and a BI-AWGN Monte Carlo harness.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .core import (
    BitPermutation,
    InvalidInputError,
    LayerPermutation,
    PolarCode,
    apply_permutation,
    encode,
    invert_permutation,
    kronecker_transform,
    layer_hamming_distance,
    layer_to_bit_permutation,
)
from .perm import PermutationSet, perm_decode, unique_codeword_count
from .sc import DecodeResult, f_minus_exact, f_minus_minsum, f_plus, sc_decode
from .scl import scl_decode

__all__ = [
    "BACKEND",
    "BitPermutation",
    "DecodeResult",
    "InvalidInputError",
    "LayerPermutation",
    "PermutationSet",
    "PolarCode",
    "apply_permutation",
    "encode",
    "f_minus_exact",
    "f_minus_minsum",
    "f_plus",
    "invert_permutation",
    "kronecker_transform",
    "layer_hamming_distance",
    "layer_to_bit_permutation",
    "perm_decode",
    "sc_decode",
    "scl_decode",
    "unique_codeword_count",
]
