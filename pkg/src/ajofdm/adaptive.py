"""Two-phase jamming-adaptive framework.

Phase 1 (symbols 1..T_e, jamming-noncoherent): 4-QAM spreading with the
approximate detector; per-block J estimates and residuals are collected.
At the phase boundary the average jammed count, the jamming variance, and
the optimized order M* are produced.  Phase 2 (symbols T_e+1..T,
jamming-coherent): spreading at order M* with the low-complexity detector
driven by the estimated variance.  Feedback of M* is modeled as an
instantaneous in-simulation hand-off.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import log2

import numpy as np

from . import link
from .analysis import optimize_order
from .channel import ChannelRealization, JammingRealization
from .constellations import build_default
from .detectors import approx_mld_batch, lowcomp_mld_batch
from .errors import ConfigurationError, InputError
from .frame import SystemConfig, active_mask
from .spreading import build_spreading


@dataclass(frozen=True)
class JammingEstimate:
    j_avg_hat: int
    sigma_z2_avg_hat: float
    samples_used: int


def estimate_j_avg(j_observations, n: int) -> int:
    """Mode of the observed per-block jammed counts; ties go to smaller J."""
    obs = np.asarray(j_observations, dtype=np.int64).ravel()
    if obs.size == 0:
        raise InputError("empty observation list")
    if np.any((obs < 0) | (obs > n)):
        raise InputError("observations must lie in [0, N]")
    counts = np.bincount(obs, minlength=n + 1)
    return int(np.argmax(counts))  # argmax takes the first (smallest) on ties


def estimate_sigma_z2_avg(blocks, sm, sigma_w2: float) -> float:
    """Average residual power beyond noise, split over the estimated jammed
    counts: sum(max(Delta, 0)) / sum(J_hat); 0 when no block saw jamming."""
    if not blocks:
        raise InputError("empty block list")
    num = 0.0
    den = 0
    for y, h, s_hat, j_hat in blocks:
        if j_hat > 0:
            resid = np.asarray(y) - np.asarray(h) * (sm.matrix @ np.asarray(s_hat))
            delta = float(np.sum(np.abs(resid) ** 2)) - resid.size * sigma_w2
            num += max(delta, 0.0)
        den += int(j_hat)
    return num / den if den > 0 else 0.0


def run_adaptive(
    cfg: SystemConfig,
    ch: ChannelRealization,
    jam: JammingRealization,
    data_bits: np.ndarray,
    noise: np.ndarray,
) -> tuple[np.ndarray, JammingEstimate, int]:
    """Run one coherence block of the two-phase framework.

    data_bits has shape (T, G, p); noise has shape (T, K).  Returns the
    decoded bits (same shape as data_bits), the jamming estimate, and M*.
    """
    if cfg.p % 2 != 0:
        raise ConfigurationError("phase 1 uses 4-QAM, so p must be even")
    data_bits = np.asarray(data_bits)
    if data_bits.shape != (cfg.T, cfg.G, cfg.p):
        raise InputError(f"data_bits must have shape (T, G, p), got {data_bits.shape}")
    mask = active_mask(cfg)
    masked = not np.all(mask)
    det_mask = np.tile(mask, (cfg.T_e, 1)) if masked else None
    rho_bar = float(np.mean(ch.power_profile))
    decoded = np.empty_like(data_bits)

    # phase 1: 4-QAM spreading + approximate MLD
    const1 = build_default(4)
    sm1 = build_spreading(cfg.N, cfg.p // 2)
    j_obs = np.zeros(0, dtype=np.int64)
    if cfg.T_e > 0:
        x1 = link.modulate_blocks(data_bits[: cfg.T_e], const1, sm1, cfg)
        y1, h_blocks, _ = link.pass_through_channel(
            x1, cfg, ch, replace_jam_window(jam, 0, cfg.T_e), noise[: cfg.T_e]
        )
        yb = y1.reshape(-1, cfg.N)
        hb = np.tile(h_blocks, (cfg.T_e, 1, 1)).reshape(-1, cfg.N)
        s_idx, j_hat, _ll, _sz = approx_mld_batch(
            yb, hb, sm1, const1, cfg.sigma_w2, mask=det_mask
        )
        decoded[: cfg.T_e] = link.decode_blocks(s_idx, const1).reshape(
            cfg.T_e, cfg.G, cfg.p
        )
        j_obs = j_hat
        # residual-based variance estimate over the whole phase
        s_hat_vals = const1.points[s_idx]
        resid = yb - hb * (s_hat_vals @ sm1.matrix.T)
        if masked:
            flat_mask = det_mask
            res2 = np.sum(np.abs(resid) ** 2 * flat_mask, axis=1)
            n_eff = flat_mask.sum(axis=1)
        else:
            res2 = np.sum(np.abs(resid) ** 2, axis=1)
            n_eff = np.full(res2.shape, cfg.N)
        delta = np.where(j_hat > 0, res2 - n_eff * cfg.sigma_w2, 0.0)
        num = float(np.sum(np.maximum(delta, 0.0)))
        den = int(np.sum(j_hat))
        sigma_z2_hat = num / den if den > 0 else 0.0
        j_avg_hat = estimate_j_avg(j_obs, cfg.N)
    else:
        h_blocks = link.split_frames(ch.cfr[None, :], cfg)[0]
        sigma_z2_hat = 0.0
        j_avg_hat = 0

    estimate = JammingEstimate(
        j_avg_hat=j_avg_hat, sigma_z2_avg_hat=sigma_z2_hat, samples_used=int(j_obs.size)
    )
    m_star = optimize_order(cfg.p, cfg.N, j_avg_hat, sigma_z2_hat, cfg.sigma_w2, rho_bar)

    # phase 2: optimized order + low-complexity MLD with the estimate
    if cfg.T_e < cfg.T:
        t2 = cfg.T - cfg.T_e
        const2 = build_default(m_star)
        sm2 = build_spreading(cfg.N, cfg.p // int(log2(m_star)))
        x2 = link.modulate_blocks(data_bits[cfg.T_e :], const2, sm2, cfg)
        jam2 = replace_jam_window(jam, cfg.T_e, cfg.T)
        y2, _, _ = link.pass_through_channel(x2, cfg, ch, jam2, noise[cfg.T_e :])
        yb = y2.reshape(-1, cfg.N)
        hb = np.tile(h_blocks, (t2, 1, 1)).reshape(-1, cfg.N)
        det_mask2 = np.tile(mask, (t2, 1)) if masked else None
        s_idx, _j, _ll = lowcomp_mld_batch(
            yb, hb, sm2, const2, cfg.sigma_w2, sigma_z2_hat, mask=det_mask2
        )
        decoded[cfg.T_e :] = link.decode_blocks(s_idx, const2).reshape(
            t2, cfg.G, cfg.p
        )
    return decoded, estimate, m_star


def replace_jam_window(jam: JammingRealization, t0: int, t1: int) -> JammingRealization:
    """View of a jamming realization restricted to symbols [t0, t1)."""
    return replace(jam, indicators=jam.indicators[t0:t1], samples=jam.samples[t0:t1])
