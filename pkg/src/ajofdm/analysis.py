"""Analytical BER machinery: pairwise error probabilities, union upper
bounds, and modulation-order optimization.

The conditional PEP uses the exact Q function; the channel-averaged PEP and
everything built on it use the two-term exponential Q approximation, whose
value at 0 is 1/3.  Union bounds are reported unclamped (they may exceed 1
at low SNR); order optimization only compares relative magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numpy as np
from scipy.special import erfc

from .constellations import Constellation, build_default, index_hamming_table
from .detectors import candidate_indices
from .errors import ConfigurationError
from .spreading import SpreadingMatrix, build_spreading

__all__ = [
    "BerBoundReport",
    "q_exact",
    "q_approx",
    "pep_conditional",
    "pep_average",
    "ber_upper",
    "ber_upper_avg",
    "candidate_orders",
    "optimize_order",
]

_PAIR_BUDGET = 1 << 16  # candidates, not pairs


@dataclass(frozen=True)
class BerBoundReport:
    value: float  # union bound, unclamped
    M: int
    J_avg: int  # -1 when the bound was computed for a specific indicator
    sigma_z2: float
    rho_bar: float

    @property
    def exceeds_one(self) -> bool:
        return self.value > 1.0


def q_exact(x):
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


def q_approx(x):
    """Two-term exponential upper approximation; equals 1/3 at x = 0."""
    x = np.asarray(x, dtype=float)
    return np.exp(-(x**2) / 2.0) / 12.0 + np.exp(-2.0 * x**2 / 3.0) / 4.0


def pep_conditional(s, s_hat, h, sm: SpreadingMatrix, c_indicator, sigma_w2, sigma_z2):
    """Exact pairwise error probability conditioned on the channel."""
    d = sm.matrix @ (np.asarray(s) - np.asarray(s_hat))
    sigma = np.asarray(c_indicator, dtype=float) * sigma_z2 + sigma_w2
    arg = 0.5 * np.sum(np.abs(np.asarray(h) * d) ** 2 / sigma)
    return float(q_exact(np.sqrt(arg)))


def pep_average(s, s_hat, sm: SpreadingMatrix, c_indicator, sigma_w2, sigma_z2, rho):
    """Channel-averaged PEP via the diagonal determinant product form."""
    d = sm.matrix @ (np.asarray(s) - np.asarray(s_hat))
    a = np.abs(d) ** 2
    sigma = np.asarray(c_indicator, dtype=float) * sigma_z2 + sigma_w2
    rho = np.broadcast_to(np.asarray(rho, dtype=float), a.shape)
    term4 = np.prod(1.0 + rho * a / (4.0 * sigma))
    term3 = np.prod(1.0 + rho * a / (3.0 * sigma))
    return float(1.0 / (12.0 * term4) + 1.0 / (4.0 * term3))


def _pair_machinery(sm: SpreadingMatrix, const: Constellation):
    """Spread candidate vectors and the per-pair bit-distance table."""
    cand_idx = candidate_indices(const.order, sm.n_symbols)
    ncand = cand_idx.shape[0]
    if ncand > _PAIR_BUDGET:
        raise ConfigurationError(
            f"|X|^S = {ncand} exceeds the exhaustive double-sum budget; "
            "use the averaged bound instead"
        )
    spread = const.points[cand_idx] @ sm.matrix.T  # (ncand, N)
    table = index_hamming_table(const)
    # e(s, s_hat) summed over symbol positions
    edist = np.zeros((ncand, ncand), dtype=np.int64)
    for j in range(sm.n_symbols):
        edist += table[np.ix_(cand_idx[:, j], cand_idx[:, j])]
    return spread, edist


def ber_upper(
    sm: SpreadingMatrix,
    const: Constellation,
    c_indicator,
    sigma_w2: float,
    sigma_z2: float,
    rho,
) -> BerBoundReport:
    """Union upper bound for a specific jamming indicator and power profile."""
    spread, edist = _pair_machinery(sm, const)
    ncand = spread.shape[0]
    p = sm.n_symbols * const.bits_per_symbol
    sigma = np.asarray(c_indicator, dtype=float) * sigma_z2 + sigma_w2
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (sm.n_subcarriers,))
    total = 0.0
    for i in range(ncand):  # chunk over s to bound memory
        a = np.abs(spread[i][None, :] - spread) ** 2  # (ncand, N)
        t4 = np.prod(1.0 + rho * a / (4.0 * sigma), axis=1)
        t3 = np.prod(1.0 + rho * a / (3.0 * sigma), axis=1)
        pep = 1.0 / (12.0 * t4) + 1.0 / (4.0 * t3)
        pep[i] = 0.0
        total += float(np.sum(pep * edist[i]))
    value = total / (p * 2**p)
    return BerBoundReport(
        value=value, M=const.order, J_avg=-1, sigma_z2=sigma_z2,
        rho_bar=float(np.mean(rho)),
    )


def ber_upper_avg(
    sm: SpreadingMatrix,
    const: Constellation,
    j_avg: int,
    sigma_w2: float,
    sigma_z2: float,
    rho_bar: float,
) -> BerBoundReport:
    """Averaged bound: per pair, the J_avg largest spread-difference entries
    take the jammed variance (the worst-case split)."""
    n = sm.n_subcarriers
    if not 0 <= j_avg <= n:
        raise ConfigurationError(f"need 0 <= J_avg <= N, got {j_avg}")
    spread, edist = _pair_machinery(sm, const)
    ncand = spread.shape[0]
    p = sm.n_symbols * const.bits_per_symbol
    denom = np.where(np.arange(n) < j_avg, sigma_z2 + sigma_w2, sigma_w2)
    total = 0.0
    for i in range(ncand):
        a = np.abs(spread[i][None, :] - spread) ** 2
        a = -np.sort(-a, axis=1)  # descending per pair
        t4 = np.prod(1.0 + rho_bar * a / (4.0 * denom), axis=1)
        t3 = np.prod(1.0 + rho_bar * a / (3.0 * denom), axis=1)
        pep = 1.0 / (12.0 * t4) + 1.0 / (4.0 * t3)
        pep[i] = 0.0
        total += float(np.sum(pep * edist[i]))
    value = total / (p * 2**p)
    return BerBoundReport(
        value=value, M=const.order, J_avg=j_avg, sigma_z2=sigma_z2, rho_bar=rho_bar
    )


def candidate_orders(p: int, n: int) -> list[int]:
    """All orders 2^(p/S) with 1 <= S <= N and p/S an integer, ascending."""
    if p < 1 or n < 1:
        raise ConfigurationError("p and N must be >= 1")
    orders = {1 << (p // s) for s in range(1, n + 1) if p % s == 0}
    return sorted(m for m in orders if m >= 2)


def optimize_order(
    p: int, n: int, j_avg: int, sigma_z2: float, sigma_w2: float, rho_bar: float
) -> int:
    """Order minimizing the averaged bound; ties break toward smaller M."""
    best_m, best_val = None, None
    for m in candidate_orders(p, n):
        s = p // int(log2(m))
        sm = build_spreading(n, s)
        const = build_default(m)
        val = ber_upper_avg(sm, const, j_avg, sigma_w2, sigma_z2, rho_bar).value
        if best_val is None or val < best_val:
            best_m, best_val = m, val
    return best_m
