"""Permutation decoding: L independent SC decodes on permuted LLRs.

No sorting is involved; the branch with the largest codeword metric wins
and ties go to the earliest permutation in the set.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .core import (
    BitPermutation,
    InvalidInputError,
    LayerPermutation,
    PolarCode,
    apply_permutation,
    invert_permutation,
    kronecker_transform,
    layer_to_bit_permutation,
)
from .sc import DecodeResult, check_llrs, sc_decode


@dataclass(frozen=True)
class PermutationSet:
    perms: tuple[LayerPermutation, ...]
    bit_perms: tuple[BitPermutation, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        perms = tuple(p if isinstance(p, LayerPermutation) else LayerPermutation(tuple(p)) for p in self.perms)
        if not perms:
            raise InvalidInputError("permutation set is empty")
        if len({p.m for p in perms}) != 1:
            raise InvalidInputError("permutations have different layer counts")
        if len(set(perms)) != len(perms):
            raise InvalidInputError("duplicate permutations in set")
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "bit_perms", tuple(layer_to_bit_permutation(p) for p in perms))

    @classmethod
    def identity(cls, m: int) -> "PermutationSet":
        return cls((LayerPermutation.identity(m),))

    @property
    def m(self) -> int:
        return self.perms[0].m

    def __len__(self):
        return len(self.perms)

    def bit_matrix(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack([p.map for p in self.bit_perms]), dtype=np.int64)


def _check(code: PolarCode, pset: PermutationSet):
    if pset.m != code.m:
        raise InvalidInputError(f"permutations act on {pset.m} layers, code has {code.m}")


def branch_results(llrs, code: PolarCode, pset: PermutationSet) -> list[DecodeResult]:
    """Run every branch; ``u_bits`` of each result is mapped back to code indexing."""
    _check(code, pset)
    llrs = check_llrs(llrs, code.n)
    out = []
    for pi in pset.bit_perms:
        res = sc_decode(apply_permutation(pi, llrs), code, pi)
        u = apply_permutation(invert_permutation(pi), res.u_bits)
        out.append(DecodeResult(u, kronecker_transform(u), res.metric, res.decision_llrs))
    return out


def perm_decode(llrs, code: PolarCode, pset: PermutationSet) -> DecodeResult:
    _check(code, pset)
    llrs = check_llrs(llrs, code.n)
    if llrs.ndim != 1:
        raise InvalidInputError("perm_decode takes a single frame; use perm_decode_batch")
    u, metric, _ = _backend.kernels.perm_decode_batch(llrs[None, :], pset.bit_matrix(), code.frozen_mask)
    u = np.asarray(u)[0]
    return DecodeResult(u, kronecker_transform(u), float(metric[0]))


def perm_decode_batch(llrs, code: PolarCode, pset: PermutationSet, threads: int = 1):
    """Decode a (batch, n) array; returns (u, metric, winning branch index).

    With ``threads > 1`` the batch is split into contiguous slices decoded on
    separate threads; results are concatenated in frame order.
    """
    _check(code, pset)
    llrs = check_llrs(np.atleast_2d(llrs), code.n)
    perms = pset.bit_matrix()
    mask = code.frozen_mask
    kern = _backend.kernels
    if threads <= 1 or llrs.shape[0] < 2:
        u, metric, win = kern.perm_decode_batch(llrs, perms, mask)
        return np.asarray(u), np.asarray(metric), np.asarray(win)
    parts = np.array_split(llrs, threads)
    with ThreadPoolExecutor(threads) as ex:
        res = list(ex.map(lambda a: kern.perm_decode_batch(np.ascontiguousarray(a), perms, mask), parts))
    return tuple(np.concatenate([np.asarray(r[i]) for r in res]) for i in range(3))


def unique_codeword_count(llrs, code: PolarCode, pset: PermutationSet) -> int:
    words = {r.codeword.tobytes() for r in branch_results(llrs, code, pset)}
    return len(words)
