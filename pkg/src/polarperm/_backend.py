"""Kernel selection: compiled Cython extension if importable, else numpy.

Set ``POLARPERM_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("POLARPERM_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        kernels = _fallback


def get(name: str | None = None):
    """Return the kernel module for ``name`` ("cython" or "python"), default active."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
