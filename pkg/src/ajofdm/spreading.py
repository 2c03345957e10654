"""Spreading-matrix construction and the anti-jamming block modulator.

Each block of S constellation symbols is spread over N subcarriers via
x = U s, where U is sqrt(N/S) times the first S columns of a fixed
N-point unit-normalized DFT matrix.  Both ends rebuild U from (N, S)
alone, so no side information is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellations import Constellation, bits_to_symbols
from .errors import ConfigurationError

__all__ = ["SpreadingMatrix", "build_base_unitary", "build_spreading", "modulate_block"]


def build_base_unitary(n: int) -> np.ndarray:
    """Unit-normalized N-point DFT matrix; exactly unitary, deterministic."""
    if n < 1:
        raise ConfigurationError(f"base unitary size must be >= 1, got {n}")
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    return w


@dataclass(frozen=True)
class SpreadingMatrix:
    n_subcarriers: int
    n_symbols: int
    matrix: np.ndarray  # (N, S) complex
    base: np.ndarray  # (N, N) unitary


def build_spreading(n: int, s: int) -> SpreadingMatrix:
    """Scale the first S columns of the base unitary by sqrt(N/S)."""
    if s < 1 or s > n:
        raise ConfigurationError(f"need 1 <= S <= N, got S={s}, N={n}")
    base = build_base_unitary(n)
    mat = np.sqrt(n / s) * base[:, :s]
    mat.setflags(write=False)
    base.setflags(write=False)
    return SpreadingMatrix(n_subcarriers=n, n_symbols=s, matrix=mat, base=base)


def modulate_block(bits: np.ndarray, c: Constellation, sm: SpreadingMatrix) -> np.ndarray:
    """Modulate p = S*log2(M) bits into an N-dimensional spread vector."""
    bits = np.asarray(bits).ravel()
    expected = sm.n_symbols * c.bits_per_symbol
    if bits.size != expected:
        raise ConfigurationError(
            f"expected {expected} bits for S={sm.n_symbols}, M={c.order}, got {bits.size}"
        )
    s = bits_to_symbols(bits, c)
    return sm.matrix @ s
