"""Successive cancellation list decoder with min-sum path metrics.

Baseline for the permutation decoder. Path metrics use the same sign
convention as the SC codeword metric (0 is best, penalties are negative),
so results of both decoders are directly comparable.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _backend
from .core import InvalidInputError, PolarCode
from .sc import DecodeResult, check_llrs


def _check_list_size(list_size) -> int:
    if int(list_size) != list_size or list_size < 1:
        raise InvalidInputError(f"invalid list size {list_size!r}")
    return int(list_size)


def scl_decode(llrs, code: PolarCode, list_size: int) -> DecodeResult:
    list_size = _check_list_size(list_size)
    llrs = check_llrs(llrs, code.n)
    if llrs.ndim != 1:
        raise InvalidInputError("scl_decode takes a single frame; use scl_decode_batch")
    u, x, metric = _backend.kernels.scl_decode_batch(llrs[None, :], code.frozen_mask, list_size)
    return DecodeResult(np.asarray(u)[0], np.asarray(x)[0], float(metric[0]))


def scl_decode_batch(llrs, code: PolarCode, list_size: int, threads: int = 1):
    """Decode a (batch, n) array; returns (u, metric)."""
    list_size = _check_list_size(list_size)
    llrs = check_llrs(np.atleast_2d(llrs), code.n)
    mask = code.frozen_mask
    kern = _backend.kernels
    if threads <= 1 or llrs.shape[0] < 2:
        u, _, metric = kern.scl_decode_batch(llrs, mask, list_size)
        return np.asarray(u), np.asarray(metric)
    parts = np.array_split(llrs, threads)
    with ThreadPoolExecutor(threads) as ex:
        res = list(ex.map(lambda a: kern.scl_decode_batch(np.ascontiguousarray(a), mask, list_size), parts))
    return np.concatenate([np.asarray(r[0]) for r in res]), np.concatenate([np.asarray(r[2]) for r in res])
