"""Bit-sliced batch kernels.

A batch of equal-length bit rows is stored time-major as an ``(n, L)`` uint64
array: word ``w[i, l]`` holds bit ``i`` of rows ``64*l .. 64*l + 63`` (row
``64*l + b`` in bit ``b``).  Every GF(2) filter then advances 64 rows per word
operation.  Padding rows past the batch size carry garbage and must be masked.
"""
import zlib
from functools import lru_cache

import numba
import numpy as np

ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
CRC32_POLY = 0xEDB88320


def n_lanes(rows):
    return -(-rows // 64)


def to_lanes(x):
    """(rows, n) uint8 -> (n, ceil(rows/64)) uint64."""
    x = np.asarray(x, np.uint8)
    rows, n = x.shape
    padded = np.zeros((n, n_lanes(rows) * 64), np.uint8)
    padded[:, :rows] = x.T
    return np.packbits(padded, axis=1, bitorder="little").view("<u8")


def from_lanes(w, rows):
    """Inverse of :func:`to_lanes`; drops padding rows."""
    w = np.ascontiguousarray(w)
    b = w.view(np.uint8).reshape(w.shape[0], -1)
    bits = np.unpackbits(b, axis=1, count=rows, bitorder="little")
    return np.ascontiguousarray(bits.T)


def broadcast(bits, lanes):
    """Replicate one bit row into every row of a lane batch."""
    bits = np.asarray(bits, np.uint8)
    col = np.where(bits.astype(bool), ONES, np.uint64(0))
    return np.repeat(col[:, None], lanes, axis=1)


def seed_words(seed, lanes):
    return broadcast(seed, lanes)


def row_mask(rows):
    """Per-lane mask of valid rows."""
    mask = np.full(n_lanes(rows), ONES, np.uint64)
    tail = rows % 64
    if tail:
        mask[-1] = np.uint64((1 << tail) - 1)
    return mask


@numba.njit(cache=True)
def feedback(w, taps, seed):
    """y[i] = w[i] ^ XOR_t y[i - t]; y[-k] is read from seed[k - 1]."""
    n, lanes = w.shape
    y = np.empty((n, lanes), np.uint64)
    for i in range(n):
        for l in range(lanes):
            v = w[i, l]
            for t in taps:
                j = i - t
                if j >= 0:
                    v ^= y[j, l]
                else:
                    v ^= seed[-j - 1, l]
            y[i, l] = v
    return y


def feedforward(w, taps, seed):
    """y[i] = w[i] ^ XOR_t w[i - t]; w[-k] is read from seed[k - 1]."""
    n = w.shape[0]
    y = np.array(w, dtype=np.uint64, copy=True)
    for t in taps:
        if t < n:
            y[t:] ^= w[: n - t]
        head = min(t, n)
        # positions i < t read seed[t - 1 - i]
        y[:head] ^= seed[t - 1 - np.arange(head)]
    return y


@numba.njit(cache=True)
def _popcount(v):
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (v * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True)
def _row_weights(w, mask, start, stop):
    n, lanes = w.shape
    depth = 1
    while (1 << depth) <= n:
        depth += 1
    out = np.zeros(lanes * 64, np.int64)
    planes = np.zeros(depth, np.uint64)
    for l in range(lanes):
        planes[:] = 0
        for i in range(start, stop):
            carry = w[i, l] & mask[l]
            k = 0
            while carry:
                t = planes[k] & carry
                planes[k] ^= carry
                carry = t
                k += 1
        for b in range(64):
            c = 0
            for k in range(depth):
                c += int((planes[k] >> np.uint64(b)) & np.uint64(1)) << k
            out[l * 64 + b] = c
    return out


def row_weights(w, rows, start=0, stop=None):
    """Hamming weight of each row over positions [start, stop)."""
    n = w.shape[0]
    stop = n if stop is None else min(stop, n)
    start = min(max(start, 0), stop)
    return _row_weights(np.ascontiguousarray(w), row_mask(rows), start, stop)[:rows]


@numba.njit(cache=True)
def _position_counts(w, mask):
    n, lanes = w.shape
    out = np.zeros(n, np.int64)
    for i in range(n):
        c = 0
        for l in range(lanes):
            c += _popcount(w[i, l] & mask[l])
        out[i] = c
    return out


def position_counts(w, rows):
    """Number of set rows at each bit position."""
    return _position_counts(np.ascontiguousarray(w), row_mask(rows))


@lru_cache(maxsize=8)
def crc32_contributions(n_bits):
    """Linear CRC-32 contribution of a lone 1 at each stream position.

    ``zlib.crc32(v) == crc32(zeros) ^ XOR(contrib[i] for set bits i)`` for
    whole-byte messages of ``n_bits`` bits, LSB-first within bytes.
    """
    return _contributions(n_bits, CRC32_POLY)


@numba.njit(cache=True)
def _contributions(n_bits, poly):
    out = np.empty(n_bits, np.uint32)
    c = poly
    for i in range(n_bits - 1, -1, -1):
        out[i] = c
        c = (c >> 1) ^ (poly if c & 1 else 0)
    return out


@numba.njit(cache=True)
def _crc_mismatch(w, n_data, contrib, zero_crc):
    lanes = w.shape[1]
    out = np.empty(lanes, np.uint64)
    syn = np.zeros(32, np.uint64)
    for l in range(lanes):
        syn[:] = 0
        for i in range(n_data):
            word = w[i, l]
            if word:
                c = contrib[i]
                for k in range(32):
                    if (c >> k) & 1:
                        syn[k] ^= word
        bad = np.uint64(0)
        for k in range(32):
            s = syn[k]
            if (zero_crc >> k) & 1:
                s = ~s
            bad |= s ^ w[n_data + k, l]
        out[l] = bad
    return out


def crc_ok(w, rows):
    """For each row, whether its trailing 32 bits are the CRC-32 of the rest."""
    n_data = w.shape[0] - 32
    if n_data % 8:
        raise ValueError("CRC-protected data must be whole bytes")
    zero_crc = zlib.crc32(bytes(n_data // 8))
    bad = _crc_mismatch(np.ascontiguousarray(w), n_data, crc32_contributions(n_data), zero_crc)
    bits = np.unpackbits(bad.view(np.uint8), bitorder="little")[:rows]
    return bits == 0
