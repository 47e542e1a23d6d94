import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phykey import scrambler as sc
from phykey.bits import to_str
import oracle

seeds7 = st.lists(st.integers(0, 1), min_size=7, max_size=7)
msgs = st.lists(st.integers(0, 1), max_size=400)


def test_ga_keystream_matches_published_sequence():
    assert to_str(sc.keystream_ga(sc.GA_SPEC, 127)) == oracle.IEEE_ALL_ONES_127


def test_ga_keystream_period_127():
    ks = sc.keystream_ga(sc.GA_SPEC, 127 * 3)
    assert np.array_equal(ks[:127], ks[127:254])
    assert all(not np.array_equal(ks[:127], np.roll(ks[:127], s)) for s in range(1, 127))


def test_ga_keystream_one_hot_seed():
    ks = sc.keystream_ga(sc.GA_SPEC.with_seed("0000001"), 7)
    assert to_str(ks) == "1000100"


def test_ga_zero_seed_is_degenerate():
    with pytest.raises(sc.DegenerateSeed, match="degenerate"):
        sc.keystream_ga(sc.GA_SPEC.with_seed([0] * 7), 10)


@pytest.mark.parametrize("bad", [dict(degree=7, taps=(4,)), dict(degree=7, taps=(0, 7)), dict(degree=7, taps=(4, 7), seed="101")])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        sc.LfsrSpec(**bad)


def test_polynomial_text():
    assert sc.PROPOSED_SPEC.polynomial() == "X^32 + X^22 + X^2 + X^1 + 1"
    assert sc.GA_SPEC.tap_mask == (1 << 3) | (1 << 6)


@given(msgs, seeds7)
@settings(max_examples=60, deadline=None)
def test_filters_match_cell_model(x, seed):
    spec = sc.GA_SPEC.with_seed(seed)
    x = np.array(x, np.uint8)
    assert sc.filter_feedback(x, spec).tolist() == oracle.feedback(x.tolist(), spec.taps, seed)
    assert sc.filter_feedforward(x, spec).tolist() == oracle.feedforward(x.tolist(), spec.taps, seed)


@given(msgs, st.lists(st.integers(0, 1), min_size=32, max_size=32))
@settings(max_examples=40, deadline=None)
def test_proposed_matches_cell_model(x, seed):
    v = sc.get_variant("proposed", seed)
    y = v.scramble(np.array(x, np.uint8))
    assert y.tolist() == oracle.two_pass_tx(x, v.spec.taps, seed)
    assert v.descramble(y).tolist() == oracle.two_pass_rx(y.tolist(), v.spec.taps, seed) == list(x)


@pytest.mark.parametrize("name", sorted(sc.VARIANTS))
@given(x=msgs)
@settings(max_examples=30, deadline=None)
def test_round_trip(name, x):
    v = sc.VARIANTS[name]
    x = np.array(x, np.uint8)
    assert np.array_equal(v.descramble(v.scramble(x)), x)


@pytest.mark.parametrize("name", sorted(sc.VARIANTS))
def test_batch_equals_rowwise(name):
    v = sc.VARIANTS[name]
    x = np.random.default_rng(5).integers(0, 2, (70, 150), dtype=np.uint8)
    batch = v.scramble(x)
    assert np.array_equal(batch, np.stack([v.scramble(r) for r in x]))
    assert np.array_equal(v.descramble(batch), x)


@pytest.mark.parametrize("name", ["gb", "proposed", "proposed7", "swapped7"])
@given(e=st.lists(st.integers(0, 1), min_size=90, max_size=90), m=st.lists(st.integers(0, 1), min_size=90, max_size=90))
@settings(max_examples=20, deadline=None)
def test_affine_error_pattern(name, e, m):
    # output error pattern depends only on the input error pattern
    v = sc.VARIANTS[name]
    e, m = np.array(e, np.uint8), np.array(m, np.uint8)
    diff = v.descramble(v.scramble(m) ^ e) ^ m
    assert np.array_equal(diff, v.descramble(e) ^ v.descramble(np.zeros_like(e)))


def test_gb_pair_is_802_11b_recurrence():
    x = np.random.default_rng(1).integers(0, 2, 64, dtype=np.uint8)
    y = sc.scramble_gb(x)
    assert y.tolist() == oracle.feedback(x.tolist(), (4, 7), [1] * 7)
    assert np.array_equal(sc.descramble_gb(y), x)


@given(msgs, st.lists(st.integers(0, 60), max_size=6), st.booleans())
@settings(max_examples=40, deadline=None)
def test_streaming_state_equals_whole(x, cuts, fb):
    x = np.array(x, np.uint8)
    st_ = sc.FilterState(sc.GA_SPEC, feedback=fb)
    points = sorted(c for c in cuts if c <= len(x))
    parts = np.split(x, points)
    out = np.concatenate([st_.process(p) for p in parts]) if len(x) else np.empty(0, np.uint8)
    whole = sc.filter_feedback(x, sc.GA_SPEC) if fb else sc.filter_feedforward(x, sc.GA_SPEC)
    assert np.array_equal(out, whole)
    st_.reset()
    assert np.array_equal(st_.register, sc.GA_SPEC.seed_bits)


def test_unknown_variant():
    with pytest.raises(ValueError, match="unknown variant"):
        sc.get_variant("nope")


def test_empty_message():
    for v in sc.VARIANTS.values():
        assert v.scramble(np.empty(0, np.uint8)).size == 0
