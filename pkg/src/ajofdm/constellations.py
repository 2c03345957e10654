"""Normalized M-ary constellations with Gray bit labelings.

Supported alphabets are Gray-coded square QAM (M in {4, 16, 64, 256}, plus
BPSK as the degenerate M=2 case) and Gray-coded PSK for the non-square
orders (M in {2, 8, 32}).  Points are unit-average-energy and ordered
lexicographically by bit label so that detector tie-breaking is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InputError


class ConstellationKind(Enum):
    PSK = "psk"
    SQUARE_QAM = "square_qam"


def _gray_decode(v: int) -> int:
    """Inverse of the binary-reflected Gray code g(i) = i ^ (i >> 1)."""
    out = 0
    while v:
        out ^= v
        v >>= 1
    return out


@dataclass(frozen=True)
class Constellation:
    """Immutable M-ary alphabet.

    points[i] is the symbol whose bit label is the log2(M)-bit binary
    expansion of i (MSB first).
    """

    order: int
    points: np.ndarray  # complex, shape (M,)
    bit_labels: tuple[str, ...]
    kind: ConstellationKind

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    def index_of(self, symbol: complex, tol: float = 1e-9) -> int:
        """Index of an exact constellation point; raises if not in the alphabet."""
        d = np.abs(self.points - symbol)
        i = int(np.argmin(d))
        if d[i] > tol:
            raise InputError(f"value {symbol} is not a constellation point")
        return i


def _square_qam_points(m: int) -> np.ndarray:
    """Gray-labeled square QAM, label = I bits || Q bits, unit mean energy."""
    bps = int(np.log2(m))
    side = 1 << (bps // 2)
    # per-axis level for a label chunk: amplitude = (side-1) - 2*gray_decode(chunk)
    levels = np.array([(side - 1) - 2 * _gray_decode(v) for v in range(side)], dtype=float)
    pts = np.empty(m, dtype=complex)
    half = bps // 2
    for idx in range(m):
        i_chunk = idx >> half
        q_chunk = idx & (side - 1)
        pts[idx] = levels[i_chunk] + 1j * levels[q_chunk]
    pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
    return pts


def _psk_points(m: int) -> np.ndarray:
    """Gray-labeled PSK: label v sits at angle 2*pi*gray_decode(v)/M."""
    pts = np.empty(m, dtype=complex)
    for v in range(m):
        i = _gray_decode(v)
        pts[v] = np.exp(2j * np.pi * i / m)
    return pts


def build_constellation(m: int, kind: ConstellationKind) -> Constellation:
    """Construct a normalized constellation; deterministic point ordering."""
    if m < 2 or (m & (m - 1)) != 0:
        raise ConfigurationError(f"order must be a power of 2 and >= 2, got {m}")
    bps = int(np.log2(m))
    if kind is ConstellationKind.SQUARE_QAM:
        if m == 2:
            pts = np.array([1.0 + 0j, -1.0 + 0j])  # BPSK as degenerate square case
        elif bps % 2 == 0:
            pts = _square_qam_points(m)
        else:
            raise ConfigurationError(f"unsupported combination (M={m}, kind=SquareQAM)")
    elif kind is ConstellationKind.PSK:
        pts = _psk_points(m)
    else:
        raise ConfigurationError(f"unsupported combination (M={m}, kind={kind})")
    labels = tuple(format(i, f"0{bps}b") for i in range(m))
    pts.setflags(write=False)
    return Constellation(order=m, points=pts, bit_labels=labels, kind=kind)


def default_kind(m: int) -> ConstellationKind:
    """Square QAM when log2(M) is even (or BPSK), PSK otherwise."""
    bps = int(np.log2(m))
    if m == 2 or bps % 2 == 0:
        return ConstellationKind.SQUARE_QAM
    return ConstellationKind.PSK


def build_default(m: int) -> Constellation:
    return build_constellation(m, default_kind(m))


def bits_to_indices(bits: np.ndarray, c: Constellation) -> np.ndarray:
    bps = c.bits_per_symbol
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % bps != 0:
        raise InputError(f"bit count {bits.size} not divisible by {bps}")
    groups = bits.reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1)
    return groups @ weights


def bits_to_symbols(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Map consecutive log2(M)-bit groups (MSB first) to constellation points."""
    return c.points[bits_to_indices(bits, c)]


def indices_to_bits(indices: np.ndarray, c: Constellation) -> np.ndarray:
    bps = c.bits_per_symbol
    indices = np.asarray(indices, dtype=np.int64).ravel()
    shifts = np.arange(bps - 1, -1, -1)
    return ((indices[:, None] >> shifts) & 1).ravel()


def symbols_to_bits(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    """Exact inverse of bits_to_symbols (entries must be constellation points)."""
    idx = np.array([c.index_of(s) for s in np.asarray(symbols).ravel()])
    return indices_to_bits(idx, c)


def hamming_distance(s: np.ndarray, s_hat: np.ndarray, c: Constellation) -> int:
    """Number of differing demodulated bits between two symbol vectors."""
    s = np.asarray(s).ravel()
    s_hat = np.asarray(s_hat).ravel()
    if s.size != s_hat.size:
        raise InputError("symbol vectors differ in length")
    bits_a = symbols_to_bits(s, c)
    bits_b = symbols_to_bits(s_hat, c)
    return int(np.sum(bits_a != bits_b))


def index_hamming_table(c: Constellation) -> np.ndarray:
    """(M, M) table of bit-label Hamming distances between point indices."""
    m = c.order
    idx = np.arange(m)
    x = idx[:, None] ^ idx[None, :]
    # popcount per entry
    table = np.zeros((m, m), dtype=np.int64)
    while np.any(x):
        table += x & 1
        x >>= 1
    return table
