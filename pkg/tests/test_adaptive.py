"""Two-phase adaptive framework tests."""

import numpy as np
import pytest

from ajofdm.adaptive import (
    estimate_j_avg,
    estimate_sigma_z2_avg,
    replace_jam_window,
    run_adaptive,
)
from ajofdm.channel import JammingPattern, Role, draw_channel, draw_jamming, substream
from ajofdm.errors import ConfigurationError, InputError
from ajofdm.frame import SystemConfig
from ajofdm.link import draw_noise
from ajofdm.spreading import build_spreading


def _cfg(**kw):
    base = dict(K=64, N=4, p=4, S=2, M=4, T=28, T_e=14, sigma_w2=0.01, sigma_z2=100.0)
    base.update(kw)
    return SystemConfig(**base)


def _realizations(cfg, pattern=JammingPattern.PARTIAL_BAND, rho=0.5, seed=0):
    ch = draw_channel(cfg, None, substream(seed, 0, Role.CHANNEL))
    jam = draw_jamming(cfg, pattern, rho, substream(seed, 0, Role.JAMMING))
    noise = draw_noise(cfg, substream(seed, 0, Role.NOISE))
    bits = substream(seed, 0, Role.DATA).integers(0, 2, size=(cfg.T, cfg.G, cfg.p))
    return ch, jam, noise, bits


def test_estimate_j_avg_mode_and_ties():
    assert estimate_j_avg([1, 2, 2, 3], 4) == 2
    assert estimate_j_avg([1, 1, 2, 2], 4) == 1  # tie -> smallest
    assert estimate_j_avg([0, 0, 0], 4) == 0
    with pytest.raises(InputError):
        estimate_j_avg([], 4)
    with pytest.raises(InputError):
        estimate_j_avg([5], 4)


def test_estimate_sigma_z2_avg_oracle():
    sm = build_spreading(1, 1)
    y = np.array([3.0 + 0j])
    h = np.array([1.0 + 0j])
    s = np.array([1.0 + 0j])
    # residual 2 -> |r|^2 - 1*sigma_w2 = 3, over J sum of 1
    assert np.isclose(estimate_sigma_z2_avg([(y, h, s, 1)], sm, 1.0), 3.0)
    # a J=0 block contributes nothing to either side
    assert np.isclose(estimate_sigma_z2_avg([(y, h, s, 1), (h, h, s, 0)], sm, 1.0), 3.0)
    assert estimate_sigma_z2_avg([(y, h, s, 0)], sm, 1.0) == 0.0
    with pytest.raises(InputError):
        estimate_sigma_z2_avg([], sm, 1.0)


def test_run_adaptive_input_validation():
    cfg = _cfg()
    ch, jam, noise, bits = _realizations(cfg)
    with pytest.raises(InputError):
        run_adaptive(cfg, ch, jam, bits[:, :, :2], noise)
    odd = _cfg(p=3, S=1, M=8)
    ch2, jam2, noise2, bits2 = _realizations(odd)
    with pytest.raises(ConfigurationError):
        run_adaptive(odd, ch2, jam2, bits2, noise2)


def test_run_adaptive_no_jamming_decodes_cleanly():
    cfg = _cfg(sigma_w2=1e-6, sigma_z2=0.0)
    ch, jam, noise, bits = _realizations(cfg, rho=0.0)
    decoded, est, m_star = run_adaptive(cfg, ch, jam, bits, noise)
    assert np.array_equal(decoded, bits)
    assert est.j_avg_hat == 0
    # occasional noise-driven false positives leave only a noise-scale residue
    assert est.sigma_z2_avg_hat < 10 * cfg.sigma_w2
    assert est.samples_used == cfg.T_e * cfg.G


def test_run_adaptive_t_e_zero_skips_phase_one():
    cfg = _cfg(T_e=0, sigma_w2=1e-6, sigma_z2=0.0)
    ch, jam, noise, bits = _realizations(cfg, rho=0.0)
    decoded, est, m_star = run_adaptive(cfg, ch, jam, bits, noise)
    assert est.samples_used == 0
    assert est.j_avg_hat == 0
    assert np.array_equal(decoded, bits)


def test_run_adaptive_estimates_jamming():
    """Partial-band rho=0.5 at SJR=-20 dB: every block carries J=2 and the
    variance estimate should land near the true 100."""
    cfg = _cfg(K=512)
    ch, jam, noise, bits = _realizations(cfg, rho=0.5, seed=3)
    decoded, est, m_star = run_adaptive(cfg, ch, jam, bits, noise)
    assert est.j_avg_hat == 2
    assert 80.0 <= est.sigma_z2_avg_hat <= 120.0
    assert decoded.shape == bits.shape


def test_run_adaptive_padded_positions():
    cfg = SystemConfig(K=10, N=4, p=4, S=2, M=4, T=8, T_e=4, sigma_w2=1e-6, sigma_z2=0.0)
    ch, jam, noise, bits = _realizations(cfg, rho=0.0)
    decoded, _est, _m = run_adaptive(cfg, ch, jam, bits, noise)
    assert np.array_equal(decoded, bits)


def test_replace_jam_window():
    cfg = _cfg()
    _ch, jam, _noise, _bits = _realizations(cfg)
    win = replace_jam_window(jam, 4, 10)
    assert win.indicators.shape == (6, cfg.K)
    assert np.array_equal(win.indicators, jam.indicators[4:10])
    assert win.sigma_z2 == jam.sigma_z2
