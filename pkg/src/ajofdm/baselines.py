"""Baseline frameworks: QAM-OFDM (random subcarrier selection with power
boost) and OFDM-IM (index modulation), each with modulation and ML
demodulation.

OFDM-IM index bits select one of the first 2^p_index subsets of size N_A in
colexicographic (combinatorial number system) order.  Baseline receivers
are jamming-agnostic by default: every subcarrier is weighted by the noise
variance alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, log2

import numpy as np

from .constellations import Constellation, bits_to_indices, indices_to_bits
from .detectors import candidate_indices
from .errors import ConfigurationError, InputError

__all__ = [
    "OfdmImConfig",
    "qamofdm_modulate",
    "qamofdm_detect",
    "ofdmim_modulate",
    "ofdmim_detect",
    "unrank_colex",
    "rank_colex",
]


# ---------------------------------------------------------------------------
# QAM-OFDM
# ---------------------------------------------------------------------------


def qamofdm_modulate(
    bits: np.ndarray, n: int, s: int, c: Constellation, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Place S boosted symbols on S random distinct subcarriers of a block."""
    if s > n:
        raise ConfigurationError(f"S = {s} exceeds N = {n}")
    bits = np.asarray(bits).ravel()
    if bits.size != s * c.bits_per_symbol:
        raise InputError(f"expected {s * c.bits_per_symbol} bits, got {bits.size}")
    symbols = c.points[bits_to_indices(bits, c)]
    indices = np.sort(rng.choice(n, size=s, replace=False))
    x = np.zeros(n, dtype=complex)
    x[indices] = np.sqrt(n / s) * symbols
    return x, indices


def qamofdm_detect(
    y: np.ndarray,
    h: np.ndarray,
    indices: np.ndarray,
    c: Constellation,
    sigma_w2: float,
    scale: float,
) -> np.ndarray:
    """Per-symbol nearest-point decision on the known active subcarriers."""
    y = np.asarray(y)
    h = np.asarray(h)
    out = []
    for k in np.asarray(indices):
        metric = np.abs(y[k] - h[k] * scale * c.points) ** 2
        out.append(int(np.argmin(metric)))  # h -> 0 degenerates to index 0
    return indices_to_bits(np.array(out), c)


# ---------------------------------------------------------------------------
# OFDM-IM
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OfdmImConfig:
    N: int
    N_A: int
    M: int

    def __post_init__(self):
        if not 1 <= self.N_A <= self.N:
            raise ConfigurationError(f"need 1 <= N_A <= N, got N_A={self.N_A}, N={self.N}")
        if self.M < 2 or (self.M & (self.M - 1)) != 0:
            raise ConfigurationError(f"M must be a power of 2, got {self.M}")

    @property
    def p_index(self) -> int:
        return int(np.floor(log2(comb(self.N, self.N_A))))

    @property
    def p_mod(self) -> int:
        return self.N_A * int(log2(self.M))

    @property
    def p(self) -> int:
        return self.p_index + self.p_mod


def unrank_colex(rank: int, n_a: int) -> np.ndarray:
    """Rank -> N_A-subset in colexicographic order (ascending element list)."""
    out = []
    r = rank
    for k in range(n_a, 0, -1):
        c_k = k - 1
        while comb(c_k + 1, k) <= r:
            c_k += 1
        out.append(c_k)
        r -= comb(c_k, k)
    return np.array(sorted(out))


def rank_colex(subset: np.ndarray) -> int:
    """Inverse of unrank_colex."""
    subset = sorted(int(v) for v in subset)
    return sum(comb(v, i + 1) for i, v in enumerate(subset))


def _active_sets(cfg: OfdmImConfig) -> np.ndarray:
    """(2^p_index, N_A) table of the usable active sets."""
    return np.array([unrank_colex(r, cfg.N_A) for r in range(1 << cfg.p_index)])


def ofdmim_modulate(bits: np.ndarray, cfg: OfdmImConfig, c: Constellation) -> np.ndarray:
    """Index bits pick the active set; modulation bits fill it with boosted symbols."""
    if int(log2(c.order)) * cfg.N_A != cfg.p_mod or c.order != cfg.M:
        raise ConfigurationError("constellation order does not match OfdmImConfig")
    bits = np.asarray(bits).ravel()
    if bits.size != cfg.p:
        raise InputError(f"expected {cfg.p} bits, got {bits.size}")
    idx_bits = bits[: cfg.p_index]
    mod_bits = bits[cfg.p_index :]
    rank = int(idx_bits @ (1 << np.arange(cfg.p_index - 1, -1, -1))) if cfg.p_index else 0
    active = unrank_colex(rank, cfg.N_A)
    symbols = c.points[bits_to_indices(mod_bits, c)]
    x = np.zeros(cfg.N, dtype=complex)
    x[active] = np.sqrt(cfg.N / cfg.N_A) * symbols
    return x


def ofdmim_detect_batch(
    y: np.ndarray,
    h: np.ndarray,
    cfg: OfdmImConfig,
    c: Constellation,
    sigma_w2: float,
    sigma_z2: float = 0.0,
    jamming_indicators: np.ndarray | None = None,
) -> np.ndarray:
    """Joint ML over active sets and symbol vectors for B blocks at once.

    Returns decoded bits of shape (B, p).  With jamming_indicators supplied
    (genie variant) the per-subcarrier metric weight becomes c*sz2 + sw2.
    """
    y = np.atleast_2d(np.asarray(y))
    h = np.atleast_2d(np.asarray(h))
    B = y.shape[0]
    sets = _active_sets(cfg)  # (nsets, N_A)
    sym_idx = candidate_indices(c.order, cfg.N_A)  # (nsym, N_A)
    scale = np.sqrt(cfg.N / cfg.N_A)
    nsets, nsym = sets.shape[0], sym_idx.shape[0]
    # hypothesis grid: x[set, sym, N]
    x = np.zeros((nsets, nsym, cfg.N), dtype=complex)
    for a in range(nsets):
        x[a, :, sets[a]] = (scale * c.points[sym_idx]).T
    pred = h[:, None, None, :] * x[None, :, :, :]
    e2 = np.abs(y[:, None, None, :] - pred) ** 2
    if jamming_indicators is not None:
        w = np.asarray(jamming_indicators) * sigma_z2 + sigma_w2  # (B, N)
        metric = np.einsum("basn,bn->bas", e2, 1.0 / w)
    else:
        metric = e2.sum(axis=-1) / sigma_w2
    flat = metric.reshape(B, -1)
    best = np.argmin(flat, axis=1)
    set_hat = best // nsym
    sym_hat = best % nsym
    bits = np.empty((B, cfg.p), dtype=np.int64)
    shifts = np.arange(cfg.p_index - 1, -1, -1)
    for b in range(B):
        if cfg.p_index:
            bits[b, : cfg.p_index] = (set_hat[b] >> shifts) & 1
        bits[b, cfg.p_index :] = indices_to_bits(sym_idx[sym_hat[b]], c)
    return bits


def ofdmim_detect(
    y: np.ndarray,
    h: np.ndarray,
    cfg: OfdmImConfig,
    c: Constellation,
    sigma_w2: float,
    sigma_z2: float = 0.0,
    jamming_aware_indicators: np.ndarray | None = None,
) -> np.ndarray:
    ind = None
    if jamming_aware_indicators is not None:
        ind = np.asarray(jamming_aware_indicators)[None, :]
    return ofdmim_detect_batch(
        y[None, :], h[None, :], cfg, c, sigma_w2, sigma_z2, jamming_indicators=ind
    )[0]
