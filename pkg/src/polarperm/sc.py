"""Successive cancellation decoding with the LLR codeword metric.

The metric accumulates ``min(0, llr)`` over frozen decisions, so it is
0 when every frozen decision agrees with its LLR sign and negative otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import BitPermutation, InvalidInputError, PolarCode


@dataclass
class DecodeResult:
    """Decoder output.

    ``u_bits`` is the u-domain bit vector: decode order for a bare
    :func:`sc_decode`, the original code's indexing for the list and
    permutation decoders. ``codeword`` is the re-encoded vector and
    ``metric`` the codeword metric.
    """

    u_bits: np.ndarray
    codeword: np.ndarray
    metric: float
    decision_llrs: np.ndarray | None = None

    def info_bits(self, code: PolarCode) -> np.ndarray:
        return self.u_bits[code.info]


def f_minus_exact(x: float, y: float) -> float:
    """``ln((e^(x+y) + 1) / (e^x + e^y))`` evaluated without overflow."""
    # ln(1 + e^(x+y)) - ln(e^x + e^y), both via logaddexp
    return float(np.logaddexp(0.0, x + y) - np.logaddexp(x, y))


def f_minus_minsum(x: float, y: float) -> float:
    """Min-sum check update; ``sign(0)`` counts as +1."""
    mag = min(abs(x), abs(y))
    return -mag if (x < 0) != (y < 0) else mag


def f_plus(x: float, y: float, u: int) -> float:
    if u not in (0, 1):
        raise InvalidInputError("u must be 0 or 1")
    return y - x if u else x + y


def check_llrs(llrs, n: int) -> np.ndarray:
    arr = np.ascontiguousarray(llrs, dtype=np.float64)
    if arr.shape[-1] != n:
        raise InvalidInputError(f"expected {n} LLRs, got {arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("LLRs must be finite")
    return arr


def sc_decode(llrs, code: PolarCode, perm: BitPermutation | None = None) -> DecodeResult:
    """Decode one frame; leaf ``g`` is frozen iff ``perm(g)`` is in F.

    ``llrs`` must already be permuted by the caller when ``perm`` is not the
    identity. The returned ``u_bits`` are in decode order and ``codeword`` is
    their Kronecker transform.
    """
    llrs = check_llrs(llrs, code.n)
    if llrs.ndim != 1:
        raise InvalidInputError("sc_decode takes a single frame")
    mask = code.frozen_mask
    if perm is not None:
        if perm.n != code.n:
            raise InvalidInputError("permutation length does not match code")
        mask = mask[perm.map]
    u0, x, metric, leaf = _backend.kernels.sc_decode(llrs, np.ascontiguousarray(mask))
    return DecodeResult(np.asarray(u0), np.asarray(x), float(metric), np.asarray(leaf))


def sc_decode_batch(llrs, code: PolarCode) -> tuple[np.ndarray, np.ndarray]:
    """Identity-permutation SC over a (batch, n) array; returns (u, metric)."""
    llrs = check_llrs(np.atleast_2d(llrs), code.n)
    ident = np.arange(code.n, dtype=np.int64)[None, :]
    u, metric, _ = _backend.kernels.perm_decode_batch(llrs, ident, code.frozen_mask)
    return np.asarray(u), np.asarray(metric)


def metric_is_valid(metric: float) -> bool:
    return metric <= 0 and not math.isnan(metric)
