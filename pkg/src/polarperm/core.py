"""Polar code parameters, the Kronecker-power encoder and permutation algebra.

Conventions shared by every module in the package:

* ``A_m`` is the plain m-fold Kronecker power of ``[[1, 0], [1, 1]]``; no
  bit-reversal stage.
* Layer ``t`` of the factor graph acts on the binary digit of weight ``2**t``
  of a bit index (layer 0 is next to the ``u`` side).
* A permutation ``p`` acts on a vector as ``out[i] = v[p[i]]``.
* Composition is ``(a o b)(i) = a(b(i))``.
* Information bits fill the non-frozen positions in ascending index order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise InvalidInputError(f"length {n} is not a power of two")
    return n.bit_length() - 1


@dataclass(frozen=True)
class PolarCode:
    """An (n, k) polar code given by its frozen index set."""

    n: int
    k: int
    frozen: frozenset[int]
    m: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "m", _log2_exact(self.n))
        if self.m < 1:
            raise InvalidInputError("code length must be at least 2")
        if not 0 < self.k <= self.n:
            raise InvalidInputError(f"dimension k={self.k} outside (0, {self.n}]")
        frozen = frozenset(int(i) for i in self.frozen)
        if any(i < 0 or i >= self.n for i in frozen):
            raise InvalidInputError("frozen index out of range")
        if len(frozen) != self.n - self.k:
            raise InvalidInputError(
                f"|F| = {len(frozen)} but n - k = {self.n - self.k}"
            )
        object.__setattr__(self, "frozen", frozen)

    @classmethod
    def from_frozen(cls, n: int, frozen) -> "PolarCode":
        frozen = frozenset(int(i) for i in frozen)
        return cls(n=n, k=n - len(frozen), frozen=frozen)

    @property
    def info(self) -> np.ndarray:
        """Information positions in ascending order."""
        return np.array([i for i in range(self.n) if i not in self.frozen], dtype=np.int64)

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.uint8)
        mask[sorted(self.frozen)] = 1
        return mask

    def is_frozen(self, i: int) -> bool:
        return i in self.frozen


@dataclass(frozen=True)
class LayerPermutation:
    """A permutation of the m factor-graph layers."""

    map: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(v) for v in self.map)
        if not perm:
            raise InvalidInputError("layer permutation must act on at least one layer")
        if sorted(perm) != list(range(len(perm))):
            raise InvalidInputError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        object.__setattr__(self, "map", perm)

    @classmethod
    def identity(cls, m: int) -> "LayerPermutation":
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.map)

    def is_identity(self) -> bool:
        return self.map == tuple(range(self.m))

    def compose(self, other: "LayerPermutation") -> "LayerPermutation":
        """``self o other``, i.e. ``t -> self(other(t))``."""
        if other.m != self.m:
            raise InvalidInputError("layer count mismatch")
        return LayerPermutation(tuple(self.map[other.map[t]] for t in range(self.m)))

    def inverse(self) -> "LayerPermutation":
        inv = [0] * self.m
        for t, v in enumerate(self.map):
            inv[v] = t
        return LayerPermutation(tuple(inv))

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.map)


@dataclass(frozen=True)
class BitPermutation:
    """A permutation of the n bit indices, stored as an int64 array."""

    map: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.map, dtype=np.int64).copy()
        if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise InvalidInputError("not a permutation of 0..n-1")
        arr.setflags(write=False)
        object.__setattr__(self, "map", arr)

    @classmethod
    def identity(cls, n: int) -> "BitPermutation":
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return self.map.size

    def __getitem__(self, i):
        return self.map[i]

    def __eq__(self, other):
        return isinstance(other, BitPermutation) and np.array_equal(self.map, other.map)

    def __hash__(self):
        return hash(self.map.tobytes())

    def compose(self, other: "BitPermutation") -> "BitPermutation":
        """``self o other``, i.e. ``i -> self(other(i))``."""
        if other.n != self.n:
            raise InvalidInputError("length mismatch")
        return BitPermutation(self.map[other.map])

    def tolist(self) -> list[int]:
        return self.map.tolist()


def kronecker_transform(u) -> np.ndarray:
    """Return ``u @ A_m`` over GF(2) using the in-place butterfly.

    Works on the last axis, so a ``(batch, n)`` array encodes every row.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    m = _log2_exact(n)
    lead = x.shape[:-1]
    for s in range(m):
        half = 1 << s
        v = x.reshape(*lead, n // (2 * half), 2, half)
        v[..., 0, :] ^= v[..., 1, :]
    return x


def generator_matrix(m: int) -> np.ndarray:
    """Explicit ``A_m`` built from repeated Kronecker products."""
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    a = np.ones((1, 1), dtype=np.uint8)
    for _ in range(m):
        a = np.kron(a, kernel)
    return a


def place_info(info_bits, code: PolarCode) -> np.ndarray:
    """Build ``u`` with zeros on F and the info bits on I (ascending)."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.shape[-1] != code.k:
        raise InvalidInputError(f"expected {code.k} information bits, got {info_bits.shape[-1]}")
    u = np.zeros(info_bits.shape[:-1] + (code.n,), dtype=np.uint8)
    u[..., code.info] = info_bits
    return u


def encode(info_bits, code: PolarCode) -> np.ndarray:
    return kronecker_transform(place_info(info_bits, code))


def extract_info(u, code: PolarCode) -> np.ndarray:
    return np.asarray(u)[..., code.info]


def layer_to_bit_permutation(pl: LayerPermutation) -> BitPermutation:
    """Induced bit permutation: digit ``t`` of ``pi(j)`` is digit ``pl(t)`` of ``j``."""
    m = pl.m
    j = np.arange(1 << m, dtype=np.int64)
    out = np.zeros_like(j)
    for t in range(m):
        out |= ((j >> pl.map[t]) & 1) << t
    return BitPermutation(out)


def apply_permutation(p: BitPermutation, v) -> np.ndarray:
    """``out[i] = v[p(i)]`` along the last axis."""
    v = np.asarray(v)
    if v.shape[-1] != p.n:
        raise InvalidInputError(f"vector length {v.shape[-1]} != permutation length {p.n}")
    return v[..., p.map]


def invert_permutation(p: BitPermutation) -> BitPermutation:
    inv = np.empty_like(p.map)
    inv[p.map] = np.arange(p.n)
    return BitPermutation(inv)


def layer_hamming_distance(a: LayerPermutation, b: LayerPermutation) -> int:
    if a.m != b.m:
        raise InvalidInputError("layer permutations of different sizes")
    return sum(x != y for x, y in zip(a.map, b.map))


def all_layer_permutations(m: int):
    """All m! layer permutations in lexicographic order."""
    for p in itertools.permutations(range(m)):
        yield LayerPermutation(p)
