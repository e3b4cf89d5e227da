"""Detector initializers: all-zero, full-block solve, SINR-greedy."""

import numpy as np

from channel_cases import random_channel
from oddmsim import oracles
from oddmsim.channel import TapTensor, apply_channel
from oddmsim.frame import make_alphabet, map_bits, modulate, random_bits
from oddmsim.init import fmi_solve, init_azi, init_dsgi, init_fmi
from oddmsim.selftest import two_tap_channel


def test_azi_is_free(rng):
    taps, _, _ = random_channel(rng)
    res = init_azi(taps)
    assert res.est_blocks is None and res.decisions is None
    assert res.flops == 0


def test_block_solve_matches_dense(rng):
    worst = 0.0
    for _ in range(10):
        taps, _, _ = random_channel(rng, m_total=20, zp_len=4, n_paths=3,
                                    max_delay=3.0)
        r = (rng.standard_normal(taps.n_blocks * taps.m_total)
             + 1j * rng.standard_normal(taps.n_blocks * taps.m_total))
        sigma2 = float(rng.uniform(0.01, 0.5))
        est, flops, dense, fallback = fmi_solve(r, taps, sigma2)
        ref = oracles.fmi_dense(r, taps, sigma2)
        worst = max(worst, np.max(np.abs(est - ref)) / np.max(np.abs(ref)))
        assert flops > 0 and dense > flops
        assert not fallback
    assert worst < 1e-10


def test_block_solve_ridge_fallback():
    # a zero channel with no noise makes the normal system singular
    taps = TapTensor(taps=np.zeros((2, 8, 3), dtype=np.complex128), zp_len=2)
    r = np.zeros(16, dtype=np.complex128)
    est, _, _, fallback = fmi_solve(r, taps, 0.0)
    assert fallback
    assert np.all(np.isfinite(est))


def test_block_init_contract(rng):
    taps, _, _ = random_channel(rng)
    alph = make_alphabet(16)
    m_data = taps.m_total - taps.zp_len
    r = (rng.standard_normal(taps.n_blocks * taps.m_total)
         + 1j * rng.standard_normal(taps.n_blocks * taps.m_total))
    res = init_fmi(r, taps, alph, 0.1)
    assert res.est_blocks.shape == (taps.n_blocks, taps.m_total)
    assert np.max(np.abs(res.est_blocks[:, m_data:])) == 0.0
    assert res.decisions.shape == (m_data, taps.n_blocks)
    # decisions are constellation points
    assert np.all(np.isin(np.round(res.decisions, 9),
                          np.round(alph.points, 9)))
    # the belief is the transform of the decided symbols
    from oddmsim.frame import from_dd
    assert np.max(np.abs(res.est_blocks[:, :m_data]
                         - from_dd(res.decisions.T))) < 1e-12


def test_greedy_visits_every_row_once(rng):
    taps, _, _ = random_channel(rng)
    alph = make_alphabet(4)
    m_data = taps.m_total - taps.zp_len
    r = (rng.standard_normal(taps.n_blocks * taps.m_total)
         + 1j * rng.standard_normal(taps.n_blocks * taps.m_total))
    res = init_dsgi(r, taps, alph, 0.1)
    assert sorted(res.order) == list(range(m_data))
    assert res.flops > 0
    assert res.decisions.shape == (m_data, taps.n_blocks)


def test_greedy_decides_perfectly_on_easy_channel(rng):
    # short-delay noiseless two-tap channels: hard cancellation is exact,
    # so the greedy pass alone already recovers the sent grid
    alph = make_alphabet(4)
    for _ in range(10):
        taps = two_tap_channel(rng, m_total=6, n_blocks=4)
        bits = random_bits(5, 4, 2, rng)
        frame = map_bits(bits, alph, 6, 1)
        r = apply_channel(taps, modulate(frame), 0.0)
        res = init_dsgi(r, taps, alph, 0.0)
        assert np.max(np.abs(res.decisions - frame.grid[:5, :])) < 1e-12


def test_greedy_batch_variant(rng):
    taps, _, _ = random_channel(rng)
    alph = make_alphabet(16)
    m_data = taps.m_total - taps.zp_len
    r = (rng.standard_normal(taps.n_blocks * taps.m_total)
         + 1j * rng.standard_normal(taps.n_blocks * taps.m_total))
    seq = init_dsgi(r, taps, alph, 0.2)
    bat = init_dsgi(r, taps, alph, 0.2, batch_decisions=True)
    # the schedule depends only on the channel, not on the decisions
    assert seq.order == bat.order
    assert bat.decisions.shape == (m_data, taps.n_blocks)
    assert np.all(np.isin(np.round(bat.decisions, 9),
                          np.round(alph.points, 9)))


def test_greedy_prefers_highest_score_first(rng):
    from oddmsim.sinr import sinr_init_all
    taps, _, _ = random_channel(rng)
    alph = make_alphabet(4)
    r = (rng.standard_normal(taps.n_blocks * taps.m_total)
         + 1j * rng.standard_normal(taps.n_blocks * taps.m_total))
    res = init_dsgi(r, taps, alph, 0.1)
    state = sinr_init_all(taps, 1.0, 0.1)
    assert res.order[0] == int(np.argmax(state.phi))
