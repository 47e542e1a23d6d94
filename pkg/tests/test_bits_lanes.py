import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phykey import bits, lanes
from oracle import crc32_lsb

bit_lists = st.lists(st.integers(0, 1), max_size=300)


def test_as_bits_from_string():
    assert bits.as_bits("1011").tolist() == [1, 0, 1, 1]
    assert bits.to_str([0, 1, 1]) == "011"


def test_as_bits_rejects_garbage():
    with pytest.raises(ValueError):
        bits.as_bits("10a")


def test_xor_length_mismatch():
    with pytest.raises(ValueError):
        bits.xor([1, 0], [1])


@given(st.binary(max_size=200))
def test_bytes_round_trip(data):
    assert bits.bits_to_bytes(bits.bytes_to_bits(data)) == data


def test_lsb_first_within_byte():
    assert bits.bytes_to_bits(b"\x01").tolist() == [1, 0, 0, 0, 0, 0, 0, 0]


@given(st.binary(max_size=64))
def test_crc_matches_zlib_and_bitwise_oracle(data):
    b = bits.bytes_to_bits(data)
    got = bits.crc32_bits(b)
    assert got.tolist() == crc32_lsb(b.tolist())
    assert bits.bits_to_bytes(got) == zlib.crc32(data).to_bytes(4, "little")


def test_crc_check_value():
    # the standard CRC-32 check value
    assert bits.bits_to_bytes(bits.crc32_bits(bits.bytes_to_bits(b"123456789"))) == (0xCBF43926).to_bytes(4, "little")


@given(st.integers(1, 200), st.integers(1, 130), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_lanes_round_trip(n, rows, seed):
    x = np.random.default_rng(seed).integers(0, 2, (rows, n), dtype=np.uint8)
    w = lanes.to_lanes(x)
    assert w.shape == (n, lanes.n_lanes(rows))
    assert np.array_equal(lanes.from_lanes(w, rows), x)


@given(st.integers(1, 150), st.integers(1, 40), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_row_weights_and_position_counts(rows, n, seed):
    x = np.random.default_rng(seed).integers(0, 2, (rows, n), dtype=np.uint8)
    w = lanes.to_lanes(x)
    assert np.array_equal(lanes.row_weights(w, rows), x.sum(axis=1))
    assert np.array_equal(lanes.row_weights(w, rows, 3, 9), x[:, 3:9].sum(axis=1))
    assert np.array_equal(lanes.position_counts(w, rows), x.sum(axis=0))


@given(st.integers(1, 100), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_crc_ok_matches_direct_check(rows, seed):
    rng = np.random.default_rng(seed)
    n = 96
    x = rng.integers(0, 2, (rows, n), dtype=np.uint8)
    good = rng.random(rows) < 0.5
    for r in np.flatnonzero(good):
        x[r, -32:] = bits.crc32_bits(x[r, :-32])
    expect = np.array([np.array_equal(bits.crc32_bits(r[:-32]), r[-32:]) for r in x])
    assert np.array_equal(lanes.crc_ok(lanes.to_lanes(x), rows), expect)
