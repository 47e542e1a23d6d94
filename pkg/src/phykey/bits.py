"""Bit-sequence helpers.

Bit sequences are plain ``numpy.uint8`` arrays holding 0/1 values.  Byte
conversion is LSB-first within each byte.
"""
import zlib

import numpy as np


def as_bits(seq):
    """Coerce a string of '0'/'1', an iterable or an array to a uint8 bit array."""
    if isinstance(seq, str):
        seq = [int(c) for c in seq if not c.isspace()]
    arr = np.asarray(seq, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bit sequences may only contain 0 and 1")
    return arr


def to_str(bits):
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def xor(a, b):
    a, b = np.asarray(a, np.uint8), np.asarray(b, np.uint8)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a ^ b


def hamming_weight(a, axis=-1):
    return np.count_nonzero(np.asarray(a), axis=axis)


def hamming_distance(a, b, axis=-1):
    return hamming_weight(xor(a, b), axis=axis)


def bytes_to_bits(data):
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8), bitorder="little")


def bits_to_bytes(bits):
    bits = np.asarray(bits, np.uint8)
    if bits.size % 8:
        raise ValueError("bit count must be a multiple of 8")
    return np.packbits(bits, bitorder="little").tobytes()


def crc32_bits(bits):
    """CRC-32 (zlib/IEEE) of a whole-byte bit sequence, returned as 32 bits.

    Bit j of the result is bit j of the integer CRC, so appending the result to
    ``bits`` gives the same stream as appending the little-endian CRC bytes.
    """
    value = zlib.crc32(bits_to_bytes(bits))
    return ((value >> np.arange(32, dtype=np.uint64)) & 1).astype(np.uint8)


def random_bits(rng, n):
    return rng.integers(0, 2, size=n, dtype=np.uint8)
