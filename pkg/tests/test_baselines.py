"""QAM-OFDM and OFDM-IM baseline tests."""

import numpy as np
import pytest

from ajofdm.baselines import (
    OfdmImConfig,
    ofdmim_detect,
    ofdmim_detect_batch,
    ofdmim_modulate,
    qamofdm_detect,
    qamofdm_modulate,
    rank_colex,
    unrank_colex,
)
from ajofdm.channel import crandn
from ajofdm.constellations import build_default
from ajofdm.errors import ConfigurationError, InputError


def test_qamofdm_modulate_structure():
    rng = np.random.default_rng(0)
    c = build_default(4)
    bits = np.array([1, 0, 0, 1])
    x, idx = qamofdm_modulate(bits, 4, 2, c, rng)
    assert x.shape == (4,)
    assert len(set(idx.tolist())) == 2
    # power boost sqrt(N/S) on unit-energy symbols
    assert np.isclose(np.sum(np.abs(x) ** 2), (4 / 2) * 2.0)
    assert np.count_nonzero(x) == 2


def test_qamofdm_roundtrip_noiseless():
    rng = np.random.default_rng(1)
    c = build_default(4)
    h = crandn(rng, 4)
    for _ in range(20):
        bits = rng.integers(0, 2, size=4)
        x, idx = qamofdm_modulate(bits, 4, 2, c, rng)
        y = h * x
        out = qamofdm_detect(y, h, idx, c, 0.01, np.sqrt(4 / 2))
        assert np.array_equal(out, bits)


def test_qamofdm_validation():
    c = build_default(4)
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigurationError):
        qamofdm_modulate(np.zeros(10, dtype=int), 4, 5, c, rng)
    with pytest.raises(InputError):
        qamofdm_modulate(np.zeros(3, dtype=int), 4, 2, c, rng)


def test_colex_unranking_first_sets():
    assert np.array_equal(unrank_colex(0, 2), [0, 1])
    assert np.array_equal(unrank_colex(1, 2), [0, 2])
    assert np.array_equal(unrank_colex(2, 2), [1, 2])
    assert np.array_equal(unrank_colex(3, 2), [0, 3])


def test_colex_roundtrip():
    from math import comb

    for r in range(comb(8, 3)):
        sub = unrank_colex(r, 3)
        assert rank_colex(sub) == r
        assert len(set(sub.tolist())) == 3


def test_ofdmim_config_bit_budget():
    im = OfdmImConfig(N=4, N_A=1, M=4)
    assert im.p_index == 2  # floor(log2(C(4,1)))
    assert im.p_mod == 2
    assert im.p == 4
    with pytest.raises(ConfigurationError):
        OfdmImConfig(N=4, N_A=5, M=4)
    with pytest.raises(ConfigurationError):
        OfdmImConfig(N=4, N_A=1, M=3)


def test_ofdmim_modulate_power_and_support():
    im = OfdmImConfig(N=4, N_A=1, M=4)
    c = build_default(4)
    x = ofdmim_modulate(np.array([1, 0, 1, 1]), im, c)
    assert np.count_nonzero(x) == 1
    assert np.isclose(np.sum(np.abs(x) ** 2), 4.0 * 1.0)  # N/N_A boost
    # index bits 10 -> rank 2 -> colex set {2}
    assert x[2] != 0


def test_ofdmim_roundtrip_noiseless_all_words():
    im = OfdmImConfig(N=4, N_A=1, M=4)
    c = build_default(4)
    rng = np.random.default_rng(2)
    h = crandn(rng, 4)
    for word in range(1 << im.p):
        bits = np.array([(word >> i) & 1 for i in range(im.p - 1, -1, -1)])
        y = h * ofdmim_modulate(bits, im, c)
        out = ofdmim_detect(y, h, im, c, 0.01)
        assert np.array_equal(out, bits)


def test_ofdmim_genie_weighting_runs():
    im = OfdmImConfig(N=4, N_A=2, M=2)
    c = build_default(2)
    rng = np.random.default_rng(3)
    h = crandn(rng, 4)
    bits = np.array([1, 0, 1, 0])  # p_index=2 plus p_mod=2
    y = h * ofdmim_modulate(bits, im, c)
    ind = np.array([1, 0, 0, 0])
    out = ofdmim_detect(y, h, im, c, 0.01, 100.0, jamming_aware_indicators=ind)
    assert np.array_equal(out, bits)


def test_ofdmim_batch_matches_single():
    im = OfdmImConfig(N=4, N_A=1, M=4)
    c = build_default(4)
    rng = np.random.default_rng(4)
    h = crandn(rng, 6, 4)
    y = crandn(rng, 6, 4)
    batch = ofdmim_detect_batch(y, h, im, c, 0.01)
    for i in range(6):
        assert np.array_equal(batch[i], ofdmim_detect(y[i], h[i], im, c, 0.01))


def test_ofdmim_modulate_validation():
    im = OfdmImConfig(N=4, N_A=1, M=4)
    with pytest.raises(ConfigurationError):
        ofdmim_modulate(np.zeros(4, dtype=int), im, build_default(2))
    with pytest.raises(InputError):
        ofdmim_modulate(np.zeros(3, dtype=int), im, build_default(4))
