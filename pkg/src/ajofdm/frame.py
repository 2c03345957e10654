"""Frame assembly: stride interleaver, zero padding, and DFT/CP utilities.

Entry n of block g lands on subcarrier n*G + g, so the N entries of one
block are spaced G subcarriers apart, dispersing any contiguous jamming
band across blocks.  Positions with index >= K (only possible when N does
not divide K) are zero padding: they carry no power and their observations
are discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InputError


@dataclass(frozen=True)
class SystemConfig:
    """All dimensioning scalars and power parameters of the link."""

    K: int  # subcarrier count
    N: int  # block size
    p: int  # bits per block
    S: int  # symbols per block
    M: int  # modulation order
    T: int = 28  # OFDM symbols per coherence block
    T_e: int = 0  # noncoherent-phase length
    sigma_w2: float = 1.0
    sigma_z2: float = 0.0
    cp_len: int = field(default=-1)  # -1 -> K // 8

    def __post_init__(self):
        if self.K < 1 or self.N < 1 or self.N > self.K:
            raise ConfigurationError(f"need 1 <= N <= K, got N={self.N}, K={self.K}")
        if self.S * int(round(math.log2(self.M))) != self.p:
            raise ConfigurationError(
                f"p = S*log2(M) violated: p={self.p}, S={self.S}, M={self.M}"
            )
        if not (0 <= self.T_e <= self.T):
            raise ConfigurationError(f"need 0 <= T_e <= T, got T_e={self.T_e}, T={self.T}")
        if self.sigma_w2 <= 0:
            raise ConfigurationError("sigma_w2 must be > 0")
        if self.sigma_z2 < 0:
            raise ConfigurationError("sigma_z2 must be >= 0")
        if self.cp_len == -1:
            object.__setattr__(self, "cp_len", self.K // 8)

    @property
    def G(self) -> int:
        return math.ceil(self.K / self.N)

    @property
    def m(self) -> int:
        """Data bits per OFDM symbol."""
        return self.p * self.G


def active_mask(cfg: SystemConfig) -> np.ndarray:
    """(G, N) boolean mask; False marks zero-padded block positions."""
    g = np.arange(cfg.G)[:, None]
    n = np.arange(cfg.N)[None, :]
    return (n * cfg.G + g) < cfg.K


def interleave(blocks: np.ndarray, K: int) -> np.ndarray:
    """Map G blocks of length N onto K subcarriers with stride G."""
    blocks = np.asarray(blocks)
    if blocks.ndim != 2:
        raise InputError("blocks must be a (G, N) array")
    G, N = blocks.shape
    if G * N < K:
        raise InputError(f"G*N = {G * N} < K = {K}")
    g = np.arange(G)[:, None]
    n = np.arange(N)[None, :]
    idx = n * G + g
    frame = np.zeros(K, dtype=complex)
    keep = idx < K
    frame[idx[keep]] = blocks[keep]
    return frame


def deinterleave(frame: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Exact inverse of interleave; padded positions come back as zeros."""
    frame = np.asarray(frame)
    if frame.shape != (cfg.K,):
        raise InputError(f"frame length {frame.shape} != K = {cfg.K}")
    g = np.arange(cfg.G)[:, None]
    n = np.arange(cfg.N)[None, :]
    idx = n * cfg.G + g
    blocks = np.zeros((cfg.G, cfg.N), dtype=complex)
    keep = idx < cfg.K
    blocks[keep] = frame[idx[keep]]
    return blocks


def to_time_domain(frame: np.ndarray, cp_len: int = 0) -> np.ndarray:
    """Unitary K-point IDFT, then optional cyclic prefix."""
    frame = np.asarray(frame)
    x_t = np.fft.ifft(frame) * np.sqrt(frame.size)
    if cp_len:
        x_t = np.concatenate([x_t[-cp_len:], x_t])
    return x_t


def from_time_domain(x: np.ndarray, K: int, cp_len: int = 0) -> np.ndarray:
    """Strip the cyclic prefix and apply the unitary K-point DFT."""
    x = np.asarray(x)
    if x.size != K + cp_len:
        raise InputError(f"expected length {K + cp_len}, got {x.size}")
    if cp_len:
        x = x[cp_len:]
    return np.fft.fft(x) / np.sqrt(K)
