"""Gaussian-approximation density evolution and frozen-set builders."""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr

from .core import InvalidInputError, PolarCode

# Chung's piecewise fit of the GA transfer function, with the usual
# quadratic-exponent piece below _KNEE: the plain fit exceeds 1 for x < 0.029,
# which would stall the check-node recursion at a spurious fixed point.
_A, _B, _C = 0.4527, 0.86, 0.0218
_QA, _QB = 0.0564, -0.48560
_KNEE = 0.867861
_SPLIT = 10.0
_LOG_PHI_KNEE = _QA * _KNEE**2 + _QB * _KNEE
_LOG_PHI_SPLIT_LOW = -_A * _SPLIT**_B + _C


@dataclass(frozen=True)
class ReliabilityProfile:
    p_hat: np.ndarray
    design_sigma: float
    # natural log of p_hat; keeps the ordering of entries that underflow to 0
    log_p: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.p_hat, dtype=np.float64)
        if np.any(p < 0) or np.any(p > 0.5):
            raise InvalidInputError("subchannel error probabilities must lie in [0, 0.5]")
        p.setflags(write=False)
        object.__setattr__(self, "p_hat", p)
        logp = np.log(p) if self.log_p is None else np.asarray(self.log_p, dtype=np.float64)
        if logp.shape != p.shape:
            raise InvalidInputError("log_p shape mismatch")
        logp.setflags(write=False)
        object.__setattr__(self, "log_p", logp)

    @property
    def n(self) -> int:
        return self.p_hat.size

    def ranking(self) -> np.ndarray:
        """Indices from least to most reliable (ties: lower index first)."""
        return np.lexsort((np.arange(self.n), -self.log_p))


def log_phi(x: float) -> float:
    """log of the GA transfer function (``phi(0) = 1``)."""
    if x <= 0:
        return 0.0
    if x < _KNEE:
        return _QA * x * x + _QB * x
    if x < _SPLIT:
        return -_A * x**_B + _C
    return 0.5 * math.log(math.pi / x) - x / 4 + math.log1p(-10.0 / (7 * x))


def phi(x: float) -> float:
    return math.exp(log_phi(x))


def phi_inverse_log(t: float) -> float:
    """Solve ``log_phi(x) = t`` for x (t <= 0)."""
    if t >= 0:
        return 0.0
    if t > _LOG_PHI_KNEE:
        # smaller root of _QA x^2 + _QB x - t = 0
        return (-_QB - math.sqrt(_QB * _QB + 4 * _QA * t)) / (2 * _QA)
    if t > _LOG_PHI_SPLIT_LOW:
        return ((_C - t) / _A) ** (1 / _B)
    hi = _SPLIT * 2
    while log_phi(hi) > t:
        hi *= 2
    return brentq(lambda x: log_phi(x) - t, _SPLIT, hi, rtol=1e-12, xtol=1e-12 * hi)


def check_node_mean(mean: float) -> float:
    """Check-side update ``phi^-1(1 - (1 - phi(m))^2)`` in the log domain."""
    lp = log_phi(mean)
    p = math.exp(lp)
    # 1 - (1 - p)^2 = p (2 - p)
    return phi_inverse_log(lp + math.log(2.0 - p))


def ga_means(m: int, sigma: float) -> np.ndarray:
    """Mean LLR of each synthetic subchannel (index MSB = first polarization step)."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    if m < 0:
        raise InvalidInputError("m must be non-negative")
    means = np.array([2.0 / sigma**2])
    for _ in range(m):
        nxt = np.empty(2 * means.size)
        nxt[0::2] = [check_node_mean(v) for v in means]
        nxt[1::2] = 2 * means
        means = nxt
    return means


def ga_density_evolution(m: int, sigma: float) -> ReliabilityProfile:
    means = ga_means(m, sigma)
    logp = np.minimum(log_p_hat(means), math.log(0.5))
    return ReliabilityProfile(np.exp(logp), float(sigma), logp)


def log_p_hat(profile_means: np.ndarray) -> np.ndarray:
    """log Q(sqrt(m/2)); stays finite where Q underflows."""
    return log_ndtr(-np.sqrt(np.asarray(profile_means) / 2))


def snr_to_sigma(snr_db: float, rate: float = 1.0, convention: str = "ebno") -> float:
    """Noise std for unit-energy BPSK.

    ``ebno``: sigma = (2 R 10^(snr/10))^-1/2; ``esno``: sigma = (2 10^(snr/10))^-1/2.
    """
    lin = 10.0 ** (snr_db / 10.0)
    if convention == "ebno":
        return (2.0 * rate * lin) ** -0.5
    if convention == "esno":
        return (2.0 * lin) ** -0.5
    raise InvalidInputError(f"unknown SNR convention {convention!r}")


def _check_nk(n: int, k: int):
    if n < 2 or n & (n - 1):
        raise InvalidInputError(f"n={n} is not a power of two >= 2")
    if not 0 < k <= n:
        raise InvalidInputError(f"k={k} outside (0, {n}]")


def frozen_from_profile(profile: ReliabilityProfile, k: int) -> PolarCode:
    _check_nk(profile.n, k)
    frozen = profile.ranking()[: profile.n - k]
    return PolarCode.from_frozen(profile.n, frozen)


def build_frozen_ga(n: int, k: int, design_snr_db: float, convention: str = "ebno") -> PolarCode:
    """Freeze the n-k least reliable subchannels under GA at the design SNR."""
    _check_nk(n, k)
    sigma = snr_to_sigma(design_snr_db, k / n, convention)
    profile = ga_density_evolution(n.bit_length() - 1, sigma)
    return frozen_from_profile(profile, k)


def build_frozen_from_sequence(n: int, k: int, seq) -> PolarCode:
    """``seq`` lists all n indices from least to most reliable."""
    _check_nk(n, k)
    seq = [int(s) for s in seq]
    if sorted(seq) != list(range(n)):
        raise InvalidInputError("reliability sequence is not a permutation of 0..n-1")
    return PolarCode.from_frozen(n, seq[: n - k])


def nr_reliability_sequence(n: int) -> list[int]:
    """The 5G NR polar sequence (TS 38.212 Table 5.3.1.2-1) restricted to length n."""
    if n < 2 or n > 1024 or n & (n - 1):
        raise InvalidInputError("5G NR sequence is defined for n = 2..1024, powers of two")
    text = resources.files("polarperm").joinpath("data/nr_polar_sequence_1024.txt").read_text()
    return [int(v) for v in text.split() if int(v) < n]


def read_sequence_file(path) -> list[int]:
    with open(path) as fh:
        return [int(line) for line in fh if line.strip()]


def write_sequence_file(path, seq) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{int(v)}\n" for v in seq)
