"""Rayleigh channel, AWGN, and jamming realizations in the frequency domain.

The channel is diagonal per subcarrier and constant over the T symbols of a
coherence block.  Jamming is modeled by per-symbol indicator vectors plus
i.i.d. complex Gaussian samples; partial-band indicators are fixed within a
coherence block while random indicators are redrawn per OFDM symbol.

RNG discipline: all draws go through counter-based Philox streams keyed by
(global seed, trial index, role), so parallel sweeps are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import InputError
from .frame import SystemConfig


class Role(IntEnum):
    CHANNEL = 0
    JAMMING = 1
    NOISE = 2
    DATA = 3


def substream(seed: int, trial: int, role: Role) -> np.random.Generator:
    """Independent counter-based stream for one (seed, trial, role) triple."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=[0, 0, trial, int(role)]))


class JammingPattern(Enum):
    PARTIAL_BAND = "partial_band"
    RANDOM = "random"


@dataclass(frozen=True)
class ChannelRealization:
    cfr: np.ndarray  # (K,) complex frequency response
    power_profile: np.ndarray  # (K,) real E|h_k|^2


@dataclass(frozen=True)
class JammingRealization:
    indicators: np.ndarray  # (T, K) 0/1
    samples: np.ndarray  # (T, K) complex
    sigma_z2: float
    pattern: JammingPattern
    rho_frac: float


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_channel(
    cfg: SystemConfig, power_profile: np.ndarray | None, rng: np.random.Generator
) -> ChannelRealization:
    """i.i.d. Rayleigh CFR with per-subcarrier variance given by the profile."""
    if power_profile is None:
        power_profile = np.ones(cfg.K)
    power_profile = np.asarray(power_profile, dtype=float)
    if power_profile.shape != (cfg.K,) or np.any(power_profile <= 0):
        raise InputError("power_profile must have length K with positive entries")
    h = crandn(rng, cfg.K) * np.sqrt(power_profile)
    return ChannelRealization(cfr=h, power_profile=power_profile)


def draw_jamming(
    cfg: SystemConfig,
    pattern: JammingPattern,
    rho_frac: float,
    rng: np.random.Generator,
) -> JammingRealization:
    """Indicators and Gaussian samples for one coherence block of T symbols."""
    if not 0.0 <= rho_frac <= 1.0:
        raise InputError(f"rho must be in [0, 1], got {rho_frac}")
    K, T = cfg.K, cfg.T
    j_tot = int(round(rho_frac * K))
    ind = np.zeros((T, K), dtype=np.int8)
    if j_tot > 0:
        if pattern is JammingPattern.PARTIAL_BAND:
            offset = int(rng.integers(0, K))
            band = (np.arange(j_tot) + offset) % K
            ind[:, band] = 1
        else:
            for t in range(T):
                ind[t, rng.choice(K, size=j_tot, replace=False)] = 1
    z = crandn(rng, T, K) * np.sqrt(cfg.sigma_z2)
    return JammingRealization(
        indicators=ind, samples=z, sigma_z2=cfg.sigma_z2, pattern=pattern, rho_frac=rho_frac
    )


def apply_channel(
    x_f: np.ndarray,
    ch: ChannelRealization,
    jam: JammingRealization,
    t: int,
    sigma_w2: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """y_k = h_k x_k + c_k z_k + w_k for OFDM symbol t."""
    x_f = np.asarray(x_f)
    K = ch.cfr.size
    if x_f.size != K:
        raise InputError(f"frame length {x_f.size} != K = {K}")
    w = crandn(rng, K) * np.sqrt(sigma_w2)
    return ch.cfr * x_f + jam.indicators[t] * jam.samples[t] + w


def snr_sjr_to_variances(snr_db: float, sjr_db: float) -> tuple[float, float]:
    """SNR = 1/sigma_w^2 and SJR = 1/sigma_z^2, both in dB."""
    return 10.0 ** (-snr_db / 10.0), 10.0 ** (-sjr_db / 10.0)
