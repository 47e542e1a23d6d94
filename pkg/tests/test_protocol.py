import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phykey import channel as ch
from phykey import protocol as pr
from phykey import scrambler as sc
import oracle

SMALL = ch.ProtocolParams(m=4, L=25)


def _block(variant=sc.PROPOSED_VARIANT, params=SMALL, seed=0):
    rng = np.random.default_rng(seed)
    key = pr.generate_seed(rng)
    return key, pr.encode_key_block(key, params, variant, rng)


def test_clean_decode_recovers_seed():
    key, block = _block()
    res = pr.decode_key_block(block, SMALL, reference=block.payload)
    assert res.success and np.array_equal(res.seed, key)
    assert res.bit_error_fraction == 0.0
    assert block.packets.shape == (4, 200)


def test_block_too_small():
    with pytest.raises(ValueError, match="cannot carry"):
        pr.encode_key_block(np.ones(32, np.uint8), ch.ProtocolParams(m=1, L=7))


@pytest.mark.parametrize("name", ["ga", "gb", "proposed"])
@given(st.lists(st.integers(0, 799), min_size=1, max_size=6, unique=True), st.integers(0, 100))
@settings(max_examples=25, deadline=None)
def test_fast_engine_matches_reference_decode(name, flips, seed):
    v = sc.VARIANTS[name]
    _, block = _block(v, seed=seed)
    bits = block.bits.copy()
    bits[flips] ^= 1
    rx = pr.KeyBlock(block.payload, bits.reshape(block.packets.shape))
    ref = pr.decode_key_block(rx, SMALL, v, reference=block.payload)
    ok, weights, seed_err, _ = pr.evaluate_errors(v, SMALL.block_bits, [np.array(flips)])
    assert bool(ok[0]) == ref.success
    assert weights[0] == round(ref.bit_error_fraction * SMALL.block_bits)
    assert seed_err[0] == np.count_nonzero(ref.payload[:32] != block.payload[:32])


def test_ga_single_flip_passes_crc_never():
    # CRC-32 catches every single bit error
    ok, weights, _, _ = pr.evaluate_errors(sc.GA_VARIANT, 800, [np.array([p]) for p in range(0, 800, 7)])
    assert not ok.any() and (weights == 1).all()


def test_crc_against_bitwise_oracle():
    _, block = _block()
    body = block.payload[:-32].tolist()
    assert block.payload[-32:].tolist() == oracle.crc32_lsb(body)


def test_flip_sampler_packet_error_rate():
    rng = np.random.default_rng(4)
    s = pr.FlipSampler(200, 0.3)
    hits = s.erred(rng, 100_000).mean()
    assert abs(hits - 0.3) < 3 * oracle.binomial_sigma(0.3, 100_000)
    ks = [s.flips(rng).size for _ in range(2000)]
    assert min(ks) >= 1
    f = s.flips(rng)
    assert np.unique(f).size == f.size and f.max() < 200


@given(st.integers(1, 300), st.integers(0, 300), st.integers(0, 99))
def test_distinct(n, k, seed):
    k = min(k, n)
    out = pr.distinct(np.random.default_rng(seed), n, k)
    assert np.unique(out).size == k and (k == 0 or (out.min() >= 0 and out.max() < n))


def test_transmit_flags_match_flips():
    _, block = _block()
    rng = np.random.default_rng(2)
    rx, flags = pr.transmit(block, ch.ChannelModel.direct(0.5), None, rng, SMALL)
    diff = (rx.packets != block.packets).any(axis=1)
    assert np.array_equal(diff, flags)


def test_transmit_bit_granularity_needs_chain():
    _, block = _block()
    with pytest.raises(ValueError, match="chain"):
        pr.transmit(block, ch.ChannelModel.direct(0.1), None, np.random.default_rng(0), SMALL, pr.BIT)


def test_bootstrap_clean_channel_single_attempt():
    res = pr.simulate_bootstrap(SMALL, ch.ChannelModel.direct(0.0), trials=50, rng_seed=1)
    assert (res.attempts == 1).all() and res.q_hat == 1.0
    assert res.t_b_hat == pytest.approx(SMALL.T_r + SMALL.airtime_s)


def test_bootstrap_q_hat_within_three_sigma():
    p = ch.ProtocolParams(m=10, L=25)
    res = pr.simulate_bootstrap(p, ch.ChannelModel.direct(0.1), trials=4000, rng_seed=3)
    q = 0.9 ** 10
    assert abs(res.q_first - q) < 3 * oracle.binomial_sigma(q, 4000)
    assert res.false_accepts == 0


def test_bootstrap_chain_bit_granularity():
    res = pr.simulate_bootstrap(SMALL, ch.DEFAULT_CHAIN, 9.0, trials=300, rng_seed=5, granularity=pr.BIT)
    assert res.capped == 0
    assert abs(res.q_first - res.q_analytic) < 4 * oracle.binomial_sigma(res.q_analytic, 300) + 0.02


def test_bootstrap_deterministic_and_job_independent():
    kw = dict(params=SMALL, model=ch.ChannelModel.direct(0.3), trials=1500, rng_seed=11)
    a = pr.simulate_bootstrap(**kw, jobs=1)
    b = pr.simulate_bootstrap(**kw, jobs=2)
    assert np.array_equal(a.attempts, b.attempts)


def test_bootstrap_cap():
    res = pr.simulate_bootstrap(SMALL, ch.ChannelModel.direct(1.0), trials=10, rng_seed=0, max_attempts=3)
    assert res.capped == 10


def test_leakage_proposed_vs_ga():
    prop = pr.leakage_report(SMALL, ch.ChannelModel.direct(0.3), trials=300, rng_seed=1, corrupted_packets=1)
    assert prop.failed == 300 and not prop.alarm
    assert abs(prop.mean - 0.5) < 0.02
    ga = pr.leakage_report(SMALL, ch.ChannelModel.direct(0.3), variant=sc.GA_VARIANT, trials=300, rng_seed=1,
                           corrupted_packets=1)
    assert ga.alarm and ga.mean < 0.05


def test_leakage_argument_checks():
    with pytest.raises(ValueError):
        pr.leakage_report(SMALL, ch.ChannelModel.direct(0.0), trials=10)
    with pytest.raises(ValueError):
        pr.leakage_report(SMALL, ch.ChannelModel.direct(0.3), trials=10, corrupted_packets=5)
