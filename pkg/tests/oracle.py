"""Slow, obviously-correct reference models used only by the tests.

Everything here walks the register one cell at a time in pure Python and
shares no code with the package.
"""
import math
from fractions import Fraction

import mpmath

# 802.11 OFDM scrambler output for an all-ones register, one full period
IEEE_ALL_ONES_127 = (
    "00001110111100101100100100000010001001100010111010110110000011001101010011100111101101000010101011111010"
    "010100011011100011111111"[:-1]
)


def shift(reg, bit):
    return [bit] + reg[:-1]


def tap_sum(reg, taps):
    acc = 0
    for t in taps:
        acc ^= reg[t - 1]
    return acc


def feedback(x, taps, seed):
    reg, out = list(seed), []
    for b in x:
        y = b ^ tap_sum(reg, taps)
        out.append(y)
        reg = shift(reg, y)
    return out


def feedforward(x, taps, seed):
    reg, out = list(seed), []
    for b in x:
        out.append(b ^ tap_sum(reg, taps))
        reg = shift(reg, b)
    return out


def keystream(taps, seed, n):
    reg, out = list(seed), []
    for _ in range(n):
        s = tap_sum(reg, taps)
        out.append(s)
        reg = shift(reg, s)
    return out


def two_pass_tx(x, taps, seed):
    return feedforward(feedforward(x, taps, seed)[::-1], taps, seed)[::-1]


def two_pass_rx(r, taps, seed):
    return feedback(feedback(list(r)[::-1], taps, seed)[::-1], taps, seed)


def crc32_lsb(bits):
    """Bitwise CRC-32 (reflected 0xEDB88320, init and xorout all ones) over LSB-first bits."""
    reg = 0xFFFFFFFF
    for b in bits:
        low = (reg ^ int(b)) & 1
        reg >>= 1
        if low:
            reg ^= 0xEDB88320
    reg ^= 0xFFFFFFFF
    return [(reg >> j) & 1 for j in range(32)]


def q_exact(P, m, dps=50):
    """(1 - P)^m at high precision."""
    with mpmath.workdps(dps):
        return mpmath.power(1 - mpmath.mpf(P), m)


def q_fraction(P, m):
    return (1 - Fraction(P)) ** m


def binomial_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)
