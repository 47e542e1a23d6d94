"""Self-describing scrambled files.

Layout: a header followed by the scrambled payload bytes.

    offset 0   variant id (1 byte): 1 ga, 2 gb, 3 two-pass, 4 swapped single pass
    offset 1   register degree (1 byte)
    offset 2   tap bitmask, uint32 little-endian, bit t-1 set for tap t
    offset 6   seed, ceil(degree/8) bytes, LSB-first
    then       payload

Payload bits are taken LSB-first within each byte.
"""
import struct

import numpy as np

from .bits import bits_to_bytes, bytes_to_bits
from .scrambler import Family, LfsrSpec, ScramblerVariant


class HeaderError(ValueError):
    pass


def variant_id(variant):
    if variant.family is Family.PROPOSED_TWO_PASS and not variant.two_pass:
        return 4
    return int(variant.family)


def encode_header(variant):
    spec = variant.spec
    if spec.degree > 32:
        raise HeaderError("header tap mask holds at most 32 cells")
    seed = np.zeros(-(-spec.degree // 8) * 8, np.uint8)
    seed[: spec.degree] = spec.seed_bits
    return struct.pack("<BBI", variant_id(variant), spec.degree, spec.tap_mask) + bits_to_bytes(seed)


def decode_header(data):
    """Return (variant, header length)."""
    if len(data) < 6:
        raise HeaderError("file too short for a scrambler header")
    vid, degree, mask = struct.unpack_from("<BBI", data)
    if vid not in (1, 2, 3, 4):
        raise HeaderError(f"bad variant id {vid}")
    if not 1 <= degree <= 32:
        raise HeaderError(f"bad register degree {degree}")
    size = 6 + -(-degree // 8)
    if len(data) < size:
        raise HeaderError("truncated seed in header")
    taps = [t for t in range(1, 33) if mask >> (t - 1) & 1]
    seed = bytes_to_bits(data[6:size])[:degree]
    try:
        spec = LfsrSpec(degree, tuple(taps), seed)
    except ValueError as exc:
        raise HeaderError(f"inconsistent header: {exc}") from None
    if vid == 4:
        return ScramblerVariant(Family.PROPOSED_TWO_PASS, spec, two_pass=False), size
    return ScramblerVariant(Family(vid), spec), size


def scramble_bytes(data, variant):
    bits = bytes_to_bits(data)
    return encode_header(variant) + bits_to_bytes(variant.scramble(bits))


def descramble_bytes(data):
    variant, size = decode_header(data)
    bits = bytes_to_bits(data[size:])
    return bits_to_bytes(variant.descramble(bits))
