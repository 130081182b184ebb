"""BI-AWGN Monte Carlo harness for block error rate estimation.

Randomness is counter based: frame ``f`` of a point draws from a Philox
stream keyed by ``(seed, f // CHUNK)`` at a fixed offset inside the chunk, so
every frame is reproducible no matter how chunks are scheduled. Errors are
accumulated in frame order and the stopping rule is evaluated on that order,
which makes results identical for any thread count.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .construction import snr_to_sigma
from .core import InvalidInputError, PolarCode, encode, extract_info
from .perm import PermutationSet, perm_decode_batch
from .scl import scl_decode_batch

log = logging.getLogger(__name__)

CHUNK = 128
CSV_HEADER = ("snr_db", "frames", "block_errors", "bler")


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    rate: float
    convention: str = "ebno"

    @property
    def sigma(self) -> float:
        return snr_to_sigma(self.snr_db, self.rate, self.convention)


@dataclass(frozen=True)
class BlerPoint:
    snr_db: float
    frames: int
    block_errors: int

    @property
    def bler(self) -> float:
        return self.block_errors / self.frames

    def stderr(self) -> float:
        p = self.bler
        return math.sqrt(max(p * (1 - p), 0.0) / self.frames)


@dataclass(frozen=True)
class StopRule:
    max_frames: int
    target_errors: int | None = None


@dataclass
class DecoderConfig:
    """``kind`` is "sc", "scl" or "perm"."""

    kind: str
    list_size: int = 1
    pset: PermutationSet | None = None
    extra: dict = field(default_factory=dict)

    def validate(self, code: PolarCode) -> None:
        if self.kind == "sc":
            return
        if self.kind == "scl":
            if self.list_size < 1:
                raise InvalidInputError("SCL list size must be >= 1")
            return
        if self.kind == "perm":
            if self.pset is None:
                raise InvalidInputError("permutation decoder needs a permutation set")
            if self.pset.m != code.m:
                raise InvalidInputError(
                    f"permutation set acts on {self.pset.m} layers, code has {code.m}")
            return
        raise InvalidInputError(f"unknown decoder {self.kind!r}")

    def decode(self, llrs: np.ndarray, code: PolarCode) -> np.ndarray:
        """Return the decoded u vectors for a (batch, n) LLR array."""
        if self.kind == "sc":
            pset = PermutationSet.identity(code.m)
            return perm_decode_batch(llrs, code, pset)[0]
        if self.kind == "scl":
            return scl_decode_batch(llrs, code, self.list_size)[0]
        return perm_decode_batch(llrs, code, self.pset)[0]

    def describe(self) -> dict:
        out = {"kind": self.kind, "list_size": self.list_size if self.kind != "perm" else len(self.pset)}
        if self.pset is not None:
            out["perms"] = [list(p.map) for p in self.pset.perms]
        out.update(self.extra)
        return out


def modulate_and_transmit(codeword, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) over AWGN; returns channel LLRs ``2 y / sigma^2``."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    x = 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)
    y = x + sigma * rng.standard_normal(x.shape)
    return 2.0 * y / sigma**2


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    key = np.random.SeedSequence([int(seed), int(chunk)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def simulate_chunk(code: PolarCode, decoder: DecoderConfig, sigma: float, seed: int, chunk: int) -> np.ndarray:
    """Per-frame block error flags for one chunk of CHUNK frames."""
    rng = chunk_rng(seed, chunk)
    info = rng.integers(0, 2, size=(CHUNK, code.k), dtype=np.uint8)
    llrs = modulate_and_transmit(encode(info, code), sigma, rng)
    u = decoder.decode(llrs, code)
    return np.any(extract_info(u, code) != info, axis=1)


def run_bler_point(code: PolarCode, decoder: DecoderConfig, channel: ChannelConfig, stop: StopRule,
                   seed: int, threads: int = 1) -> BlerPoint:
    if stop.max_frames < 1:
        raise InvalidInputError("max_frames must be >= 1")
    decoder.validate(code)
    sigma = channel.sigma
    target = stop.target_errors
    n_chunks = -(-stop.max_frames // CHUNK)
    frames = errors = 0
    next_chunk = 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while next_chunk < n_chunks:
            wave = range(next_chunk, min(n_chunks, next_chunk + max(threads, 1)))
            if pool is None:
                flags = [simulate_chunk(code, decoder, sigma, seed, c) for c in wave]
            else:
                flags = list(pool.map(lambda c: simulate_chunk(code, decoder, sigma, seed, c), wave))
            next_chunk = wave.stop
            for c, fl in zip(wave, flags):
                usable = min(CHUNK, stop.max_frames - c * CHUNK)
                fl = fl[:usable]
                if target is not None and errors + int(fl.sum()) >= target:
                    # stop at the frame carrying the target-th error
                    idx = int(np.flatnonzero(fl)[target - errors - 1])
                    return BlerPoint(channel.snr_db, frames + idx + 1, target)
                frames += usable
                errors += int(fl.sum())
    finally:
        if pool is not None:
            pool.shutdown()
    return BlerPoint(channel.snr_db, frames, errors)


def snr_grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise InvalidInputError("snr_step must be positive")
    if stop < start:
        raise InvalidInputError("empty SNR range")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), 0x5EED, int(index)]).generate_state(1, np.uint64)[0])


def run_sweep(code: PolarCode, decoder: DecoderConfig, snr_start: float, snr_stop: float, snr_step: float,
              stop: StopRule, seed: int, convention: str = "ebno", threads: int = 1,
              early_exit_bler: float | None = None) -> list[BlerPoint]:
    """One point per SNR value; point i uses a seed derived from ``(seed, i)``.

    ``early_exit_bler`` ends the sweep once a point's BLER falls below it.
    """
    points = []
    for i, snr in enumerate(snr_grid(snr_start, snr_stop, snr_step)):
        ch = ChannelConfig(snr, code.k / code.n, convention)
        pt = run_bler_point(code, decoder, ch, stop, point_seed(seed, i), threads)
        log.info("snr=%.3f frames=%d errors=%d bler=%.3e", pt.snr_db, pt.frames, pt.block_errors, pt.bler)
        points.append(pt)
        if early_exit_bler is not None and pt.bler < early_exit_bler:
            break
    return points


def format_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([f"{p.snr_db:.6f}", p.frames, p.block_errors, f"{p.bler:.9e}"])
    return buf.getvalue()


def write_csv(path, points) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(points))


def read_csv(path) -> list[BlerPoint]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [BlerPoint(float(r["snr_db"]), int(r["frames"]), int(r["block_errors"])) for r in rows]


def snr_at_bler(points, target: float) -> float:
    """SNR where the curve crosses ``target``, interpolating log10(BLER) linearly.

    Uses the first adjacent pair that brackets the target. Raises ValueError
    when the sweep does not bracket it.
    """
    pts = sorted(points, key=lambda p: p.snr_db)
    for a, b in zip(pts, pts[1:]):
        if a.bler >= target >= b.bler and b.bler > 0:
            if a.bler == b.bler:
                return a.snr_db
            la, lb, lt = math.log10(a.bler), math.log10(b.bler), math.log10(target)
            return a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db)
    raise ValueError(f"sweep does not bracket BLER {target:g}")
