"""Permutation-set selection and orbit-respecting frozen-set construction.

Two optimizers live here:

* :func:`optimize_perm_set` scores layer permutations by the GA block-error
  estimate of the permuted code and greedily picks a well-scored,
  mutually distant subset.
* :func:`build_frozen_joint` freezes whole orbits of the bit indices under
  the permutations that fix a chosen set of layers, so every such
  permutation maps the frozen set onto itself.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from .construction import ReliabilityProfile
from .core import (
    BitPermutation,
    InvalidInputError,
    LayerPermutation,
    PolarCode,
    invert_permutation,
    layer_hamming_distance,
    layer_to_bit_permutation,
)
from .perm import PermutationSet

MAX_FULL_ENUMERATION_M = 10
MAX_FREE_LAYERS = 8


class InfeasibleError(RuntimeError):
    """The requested number of permutations could not be reached."""

    def __init__(self, message: str, achieved: int):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class OrbitSplit:
    groups: tuple[frozenset[int], ...]
    fixed_layers: frozenset[int]

    def group_of(self) -> np.ndarray:
        n = sum(len(g) for g in self.groups)
        out = np.empty(n, dtype=np.int64)
        for gi, g in enumerate(self.groups):
            out[list(g)] = gi
        return out


@dataclass(frozen=True)
class ScoredPermutation:
    perm: LayerPermutation
    bler_bound: float


@dataclass(frozen=True)
class JointResult:
    code: PolarCode
    split: OrbitSplit
    orbit_exact: bool
    # dimension of the orbit-respecting code before relaxation (== k when exact)
    relaxed_from_k: int


def perm_bler_estimate(profile: ReliabilityProfile, code: PolarCode, perm: BitPermutation) -> float:
    """``1 - prod_{i in I} (1 - P_hat[perm(i)])``, accumulated as a sum of logs."""
    if profile.n != code.n or perm.n != code.n:
        raise InvalidInputError("profile, code and permutation sizes differ")
    idx = perm.map[code.info]
    return float(-np.expm1(np.sum(np.log1p(-profile.p_hat[idx]))))


def decoding_bler_estimate(profile: ReliabilityProfile, code: PolarCode, pl: LayerPermutation) -> float:
    """Estimate for the SC branch that decodes with layer permutation ``pl``.

    That branch decodes position g as information iff ``pi(g)`` is not frozen,
    so the reliabilities entering the product are ``P_hat[pi^-1(i)]``.
    """
    return perm_bler_estimate(profile, code, invert_permutation(layer_to_bit_permutation(pl)))


def list_bler_lower_bound(estimates) -> float:
    return float(np.prod(np.asarray(estimates, dtype=np.float64)))


def _candidates(m: int, scope: str, rng_seed: int = 0) -> list[LayerPermutation]:
    if scope == "full":
        if m > MAX_FULL_ENUMERATION_M:
            raise InvalidInputError(f"full enumeration limited to m <= {MAX_FULL_ENUMERATION_M}; use random:<count>")
        return [LayerPermutation(p) for p in itertools.permutations(range(m))]
    if scope.startswith("fixed:"):
        fixed = {int(t) for t in scope[len("fixed:"):].split(",") if t.strip()}
        return enumerate_available_perms(m, fixed)
    if scope.startswith("random:"):
        count = int(scope[len("random:"):])
        rng = random.Random(rng_seed)
        seen = {tuple(range(m))}
        out = [LayerPermutation.identity(m)]
        limit = math.factorial(m)
        while len(out) < min(count, limit):
            p = list(range(m))
            rng.shuffle(p)
            if tuple(p) not in seen:
                seen.add(tuple(p))
                out.append(LayerPermutation(tuple(p)))
        return sorted(out, key=lambda p: p.map)
    raise InvalidInputError(f"unknown candidate scope {scope!r}")


def score_permutations(profile, code, candidates) -> list[ScoredPermutation]:
    """Score every candidate; vectorised over the candidate set."""
    m = code.m
    j = np.arange(code.n, dtype=np.int64)
    digits = (j[None, :] >> np.arange(m)[:, None]) & 1  # digits[t, j]
    log_q = np.log1p(-profile.p_hat)
    info = code.info
    out = []
    batch = 4096
    for start in range(0, len(candidates), batch):
        chunk = candidates[start:start + batch]
        # inverse bit permutation of pl is induced by pl^-1: digit pl(t) of the
        # output is digit t of the input
        inv = np.zeros((len(chunk), code.n), dtype=np.int64)
        for c, pl in enumerate(chunk):
            for t in range(m):
                inv[c] |= digits[t] << pl.map[t]
        vals = -np.expm1(log_q[inv[:, info]].sum(axis=1))
        out.extend(ScoredPermutation(pl, float(v)) for pl, v in zip(chunk, vals))
    return out


def optimize_perm_set(
    profile: ReliabilityProfile,
    code: PolarCode,
    list_size: int,
    min_dist: int = 0,
    candidate_scope: str = "full",
    seed_identity: bool = True,
    rng_seed: int = 0,
) -> PermutationSet:
    """Pick ``list_size`` layer permutations with low estimated BLER.

    Candidates are sorted by score (ascending; ties lexicographic) and
    accepted greedily when their layer Hamming distance to every accepted
    permutation is at least ``min_dist``. When all scores tie (orbit-exact
    codes) the greedy pass maximises the minimum distance instead.
    """
    return PermutationSet(tuple(s.perm for s in optimize_perm_set_scored(
        profile, code, list_size, min_dist, candidate_scope, seed_identity, rng_seed)))


def optimize_perm_set_scored(profile, code, list_size, min_dist=0, candidate_scope="full",
                             seed_identity=True, rng_seed=0) -> list[ScoredPermutation]:
    if list_size < 1:
        raise InvalidInputError("list size must be >= 1")
    if min_dist < 0:
        raise InvalidInputError("min_dist must be >= 0")
    if profile.n != code.n:
        raise InvalidInputError("profile length does not match code")
    m = code.m
    scored = score_permutations(profile, code, _candidates(m, candidate_scope, rng_seed))
    scored.sort(key=lambda s: (s.bler_bound, s.perm.map))
    chosen: list[ScoredPermutation] = []
    if seed_identity:
        ident = LayerPermutation.identity(m)
        hit = [s for s in scored if s.perm == ident]
        chosen.append(hit[0] if hit else ScoredPermutation(ident, decoding_bler_estimate(profile, code, ident)))
    rest = [s for s in scored if not chosen or s.perm != chosen[0].perm]

    scores = np.array([s.bler_bound for s in rest])
    all_tied = scores.size > 1 and np.ptp(scores) <= 1e-12 * max(scores.max(), 1e-300)
    if all_tied:
        chosen = _select_max_spread(chosen, rest, list_size, min_dist)
    else:
        for s in rest:
            if len(chosen) >= list_size:
                break
            if all(layer_hamming_distance(s.perm, c.perm) >= min_dist for c in chosen):
                chosen.append(s)
    if len(chosen) < list_size:
        raise InfeasibleError(
            f"only {len(chosen)} of {list_size} permutations satisfy min_dist={min_dist}", len(chosen))
    # keep the identity first, then ascending score
    head, tail = chosen[:1], sorted(chosen[1:], key=lambda s: (s.bler_bound, s.perm.map))
    return head + tail if seed_identity else sorted(chosen, key=lambda s: (s.bler_bound, s.perm.map))


def _select_max_spread(chosen, rest, list_size, min_dist):
    chosen = list(chosen)
    pool = list(rest)
    while len(chosen) < list_size and pool:
        best, best_d = None, -1
        for s in pool:
            d = min((layer_hamming_distance(s.perm, c.perm) for c in chosen), default=s.perm.m)
            if d > best_d:
                best, best_d = s, d
        if best_d < min_dist:
            break
        chosen.append(best)
        pool.remove(best)
    return chosen


def random_perm_set(m: int, list_size: int, seed: int = 0) -> PermutationSet:
    """Identity plus ``list_size - 1`` distinct uniformly random layer permutations."""
    if list_size > math.factorial(m):
        raise InvalidInputError("list size exceeds m!")
    rng = random.Random(seed)
    perms = [tuple(range(m))]
    while len(perms) < list_size:
        p = list(range(m))
        rng.shuffle(p)
        if tuple(p) not in perms:
            perms.append(tuple(p))
    return PermutationSet(tuple(LayerPermutation(p) for p in perms))


def compute_orbits(m: int, fixed_layers) -> OrbitSplit:
    """Orbits of {0..n-1} under all layer permutations that fix ``fixed_layers``.

    Two indices share an orbit iff they agree on the fixed digits and have the
    same number of ones on the free digits. Groups are ordered by smallest member.
    """
    fixed = frozenset(int(t) for t in fixed_layers)
    if any(t < 0 or t >= m for t in fixed):
        raise InvalidInputError("fixed layer out of range")
    fixed_mask = sum(1 << t for t in fixed)
    groups: dict[tuple[int, int], set[int]] = {}
    for j in range(1 << m):
        key = (j & fixed_mask, bin(j & ~fixed_mask).count("1"))
        groups.setdefault(key, set()).add(j)
    ordered = sorted((frozenset(g) for g in groups.values()), key=min)
    return OrbitSplit(tuple(ordered), fixed)


def enumerate_available_perms(m: int, fixed_layers) -> list[LayerPermutation]:
    """All layer permutations fixing every layer in ``fixed_layers``, lexicographic."""
    fixed = sorted({int(t) for t in fixed_layers})
    if any(t < 0 or t >= m for t in fixed):
        raise InvalidInputError("fixed layer out of range")
    free = [t for t in range(m) if t not in fixed]
    if len(free) > MAX_FREE_LAYERS:
        raise InvalidInputError(f"{len(free)} free layers exceeds enumeration guard {MAX_FREE_LAYERS}")
    out = []
    for images in itertools.permutations(free):
        p = list(range(m))
        for src, dst in zip(free, images):
            p[src] = dst
        out.append(LayerPermutation(tuple(p)))
    return sorted(out, key=lambda p: p.map)


def build_frozen_joint(n: int, k: int, fixed_layers, profile: ReliabilityProfile) -> JointResult:
    """Freeze whole orbits, worst first, until at least n-k indices are frozen.

    On overshoot, the last orbit is unfrozen (giving dimension k' > k) and its
    least reliable members are frozen individually until the dimension is k.
    """
    if n < 2 or n & (n - 1):
        raise InvalidInputError(f"n={n} is not a power of two >= 2")
    if not 0 < k <= n:
        raise InvalidInputError(f"k={k} outside (0, {n}]")
    if profile.n != n:
        raise InvalidInputError("profile length does not match n")
    m = n.bit_length() - 1
    split = compute_orbits(m, fixed_layers)
    logp = profile.log_p
    # value = worst member; ties by smallest index for reproducibility
    order = sorted(split.groups, key=lambda g: (-max(logp[i] for i in g), min(g)))
    target = n - k
    frozen: set[int] = set()
    last = None
    for g in order:
        if len(frozen) >= target:
            break
        frozen |= g
        last = g
    if len(frozen) == target:
        return JointResult(PolarCode.from_frozen(n, frozen), split, True, k)
    frozen -= last
    k_prime = n - len(frozen)
    members = sorted(last, key=lambda i: (-logp[i], i))
    frozen |= set(members[: target - len(frozen)])
    return JointResult(PolarCode.from_frozen(n, frozen), split, False, k_prime)
