"""Vectorized frequency-domain link helpers shared by the Monte Carlo
harness and the adaptive framework.

The channel is diagonal per subcarrier, so the whole chain (interleave,
channel, deinterleave) is the same arithmetic whether done frame-wise or
block-wise; these helpers do it for all T symbols and G blocks at once.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelRealization, JammingRealization, crandn
from .constellations import Constellation, bits_to_indices, indices_to_bits
from .frame import SystemConfig, active_mask
from .spreading import SpreadingMatrix


def _index_grid(cfg: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    g = np.arange(cfg.G)[:, None]
    n = np.arange(cfg.N)[None, :]
    idx = n * cfg.G + g
    return idx, idx < cfg.K


def assemble_frames(blocks: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """(..., G, N) block values -> (..., K) frequency frames (stride map)."""
    idx, keep = _index_grid(cfg)
    lead = blocks.shape[:-2]
    frames = np.zeros(lead + (cfg.K,), dtype=complex)
    frames[..., idx[keep]] = blocks[..., keep]
    return frames


def split_frames(frames: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """(..., K) frames -> (..., G, N) blocks; padded positions are zero."""
    idx, keep = _index_grid(cfg)
    lead = frames.shape[:-1]
    blocks = np.zeros(lead + (cfg.G, cfg.N), dtype=complex)
    blocks[..., keep] = frames[..., idx[keep]]
    return blocks


def modulate_blocks(
    bits: np.ndarray, const: Constellation, sm: SpreadingMatrix, cfg: SystemConfig
) -> np.ndarray:
    """(..., G, p) bits -> (..., G, N) spread block vectors, padding zeroed."""
    lead = bits.shape[:-1]
    idx = bits_to_indices(bits.reshape(-1, bits.shape[-1]), const).reshape(
        lead + (sm.n_symbols,)
    )
    x = const.points[idx] @ sm.matrix.T
    return x * active_mask(cfg)


def decode_blocks(s_indices: np.ndarray, const: Constellation) -> np.ndarray:
    """(..., S) constellation indices -> (..., S*log2(M)) bits."""
    lead = s_indices.shape[:-1]
    bps = const.bits_per_symbol
    return indices_to_bits(s_indices.reshape(-1, s_indices.shape[-1]), const).reshape(
        lead + (s_indices.shape[-1] * bps,)
    )


def draw_noise(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """(T, K) AWGN frames for one coherence block."""
    return crandn(rng, cfg.T, cfg.K) * np.sqrt(cfg.sigma_w2)


def pass_through_channel(
    x_blocks: np.ndarray,
    cfg: SystemConfig,
    ch: ChannelRealization,
    jam: JammingRealization,
    noise: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run (T, G, N) transmit blocks through the channel.

    Returns (y_blocks (T, G, N), h_blocks (G, N), jam_blocks (T, G, N)).
    """
    x_f = assemble_frames(x_blocks, cfg)
    y_f = ch.cfr[None, :] * x_f + jam.indicators * jam.samples + noise
    y_blocks = split_frames(y_f, cfg)
    h_blocks = split_frames(ch.cfr[None, :], cfg)[0]
    jam_blocks = split_frames((jam.indicators * jam.samples).astype(complex), cfg)
    return y_blocks, h_blocks, jam_blocks
