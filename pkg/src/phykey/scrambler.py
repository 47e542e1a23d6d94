"""LFSR scrambler/descrambler circuits.

Three families are modelled bit-exactly:

* ``GA_ADDITIVE``: an autonomous LFSR keystream XORed onto the data
  (802.11a/g OFDM mode, G(X) = X^7 + X^4 + 1).
* ``GB_MULTIPLICATIVE``: the self-synchronising pair of 802.11b, a feedback
  filter at the transmitter and a feedforward filter at the receiver.
* ``PROPOSED_TWO_PASS``: the GB pair with roles swapped (feedforward at the
  transmitter, feedback at the receiver) and each side run twice, the second
  pass over the reversed output of the first (a LIFO buffer).  The default
  register is 32 cells, G(X) = X^32 + X^22 + X^2 + X + 1.

Register convention: the cell at delay ``t`` holds the bit seen ``t`` steps
earlier; ``seed[t - 1]`` is the content of that cell before the first bit.
Every circuit is reset to its seed at the start of each pass.

All functions accept a single bit row ``(n,)`` or a batch ``(rows, n)``.
"""
import enum
from dataclasses import dataclass, field

import numpy as np

from . import lanes as ln
from .bits import as_bits


class DegenerateSeed(ValueError):
    pass


@dataclass(frozen=True)
class LfsrSpec:
    """Tap set and seed of a shift register.

    ``taps`` are the exponents of the nonzero terms of G(X) other than the
    constant term, so ``degree`` is always a tap.
    """

    degree: int
    taps: tuple
    seed: tuple = field(default=None)

    def __post_init__(self):
        taps = tuple(sorted(set(int(t) for t in self.taps)))
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.degree not in taps:
            raise ValueError("degree must be one of the taps")
        if taps[0] < 1 or taps[-1] > self.degree:
            raise ValueError(f"taps must lie in [1, {self.degree}]")
        seed = (1,) * self.degree if self.seed is None else tuple(int(b) for b in as_bits(self.seed))
        if len(seed) != self.degree:
            raise ValueError(f"seed must have {self.degree} bits, got {len(seed)}")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "seed", seed)

    @classmethod
    def from_polynomial(cls, exponents, seed=None):
        """Build from the exponents of G(X), e.g. ``(7, 4, 0)``."""
        exps = [e for e in exponents if e != 0]
        return cls(max(exps), tuple(exps), seed)

    def with_seed(self, seed):
        return LfsrSpec(self.degree, self.taps, seed)

    @property
    def tap_array(self):
        return np.asarray(self.taps, np.int64)

    @property
    def seed_bits(self):
        return np.asarray(self.seed, np.uint8)

    @property
    def tap_mask(self):
        return sum(1 << (t - 1) for t in self.taps)

    def polynomial(self):
        return " + ".join([f"X^{t}" for t in reversed(self.taps)] + ["1"])


GA_SPEC = LfsrSpec.from_polynomial((7, 4, 0))
PROPOSED_SPEC = LfsrSpec.from_polynomial((32, 22, 2, 1, 0))


# -- lane-level building blocks ---------------------------------------------

def _feedback_lanes(w, spec):
    return ln.feedback(w, spec.tap_array, ln.seed_words(spec.seed_bits, w.shape[1]))


def _feedforward_lanes(w, spec):
    return ln.feedforward(w, spec.taps, ln.seed_words(spec.seed_bits, w.shape[1]))


def _reverse(w):
    return np.ascontiguousarray(w[::-1])


def _apply(x, lane_fn):
    """Run a lane-level transform on a bit row or a batch of rows."""
    x = np.asarray(x, np.uint8)
    if x.ndim == 1:
        w = x.astype(np.uint64)[:, None]
        return (lane_fn(w)[:, 0] & np.uint64(1)).astype(np.uint8)
    rows = x.shape[0]
    if rows == 0:
        return x.copy()
    return ln.from_lanes(lane_fn(ln.to_lanes(x)), rows)


# -- generic filters ----------------------------------------------------------

def filter_feedback(x, spec):
    """y[i] = x[i] ^ XOR_{t in taps} y[i - t] (divides by G, spreads errors forever)."""
    return _apply(x, lambda w: _feedback_lanes(w, spec))


def filter_feedforward(x, spec):
    """y[i] = x[i] ^ XOR_{t in taps} x[i - t] (multiplies by G; inverse of feedback)."""
    return _apply(x, lambda w: _feedforward_lanes(w, spec))


class FilterState:
    """Streaming filter whose register persists across calls.

    Feeding a sequence in chunks gives the same output as feeding it whole.
    Not thread-safe; use one instance per stream.
    """

    def __init__(self, spec, feedback=True):
        self.spec = spec
        self.feedback = feedback
        self.register = spec.seed_bits.copy()

    def process(self, bits):
        bits = as_bits(bits)
        spec = self.spec.with_seed(self.register)
        if self.feedback:
            out = filter_feedback(bits, spec)
            history = out
        else:
            out = filter_feedforward(bits, spec)
            history = bits
        d = self.spec.degree
        recent = history[::-1][:d]
        self.register = np.concatenate([recent, self.register[: d - len(recent)]]).astype(np.uint8)
        return out

    def reset(self):
        self.register = self.spec.seed_bits.copy()


# -- GA: additive --------------------------------------------------------------

def keystream_ga(spec, n):
    """Output of the autonomous LFSR: s[i] = XOR_t s[i - t], period 2^7 - 1 for GA_SPEC."""
    if not any(spec.seed):
        raise DegenerateSeed("degenerate all-zero keystream")
    return filter_feedback(np.zeros(n, np.uint8), spec)


def scramble_ga(x, spec=GA_SPEC):
    x = np.asarray(x, np.uint8)
    return x ^ keystream_ga(spec, x.shape[-1])


descramble_ga = scramble_ga


# -- GB: multiplicative (802.11b) ---------------------------------------------

def _gb_spec(seed):
    return GA_SPEC if seed is None else GA_SPEC.with_seed(seed)


def scramble_gb(x, seed=None):
    """Feedback scrambler: y[i] = x[i] ^ y[i-4] ^ y[i-7]."""
    return filter_feedback(x, _gb_spec(seed))


def descramble_gb(r, seed=None):
    """Feedforward descrambler: x[i] = r[i] ^ r[i-4] ^ r[i-7]."""
    return filter_feedforward(r, _gb_spec(seed))


# -- proposed two-pass -------------------------------------------------------

def _two_pass(w, one_pass):
    # pass 1 in input order, LIFO, pass 2, LIFO again so output is in natural order
    return _reverse(one_pass(_reverse(one_pass(w))))


def _proposed_tx_lanes(w, spec):
    return _two_pass(w, lambda v: _feedforward_lanes(v, spec))


def _proposed_rx_lanes(w, spec):
    # exact inverse of the transmitter: undo the final reversal first
    return _feedback_lanes(_reverse(_feedback_lanes(_reverse(w), spec)), spec)


def scramble_proposed(x, spec=PROPOSED_SPEC):
    return _apply(x, lambda w: _proposed_tx_lanes(w, spec))


def descramble_proposed(r, spec=PROPOSED_SPEC):
    return _apply(r, lambda w: _proposed_rx_lanes(w, spec))


# -- variants -----------------------------------------------------------------

class Family(enum.IntEnum):
    GA_ADDITIVE = 1
    GB_MULTIPLICATIVE = 2
    PROPOSED_TWO_PASS = 3


@dataclass(frozen=True)
class ScramblerVariant:
    """A scrambler/descrambler pair.

    ``two_pass`` only matters for the proposed family; with ``two_pass=False``
    it is the swapped single-pass circuit (802.11b scrambler used as the
    descrambler).
    """

    family: Family
    spec: LfsrSpec
    two_pass: bool = True
    pass_reset: bool = field(default=True, init=False)

    @property
    def name(self):
        if self.family is Family.GA_ADDITIVE:
            return "ga"
        if self.family is Family.GB_MULTIPLICATIVE:
            return "gb"
        base = "proposed" if self.two_pass else "swapped"
        return base if self.spec.degree == 32 else f"{base}{self.spec.degree}"

    def scramble_lanes(self, w):
        if self.family is Family.GA_ADDITIVE:
            ks = keystream_ga(self.spec, w.shape[0])
            return w ^ ln.broadcast(ks, w.shape[1])
        if self.family is Family.GB_MULTIPLICATIVE:
            return _feedback_lanes(w, self.spec)
        if self.two_pass:
            return _proposed_tx_lanes(w, self.spec)
        return _feedforward_lanes(w, self.spec)

    def descramble_lanes(self, w):
        if self.family is Family.GA_ADDITIVE:
            return self.scramble_lanes(w)
        if self.family is Family.GB_MULTIPLICATIVE:
            return _feedforward_lanes(w, self.spec)
        if self.two_pass:
            return _proposed_rx_lanes(w, self.spec)
        return _feedback_lanes(w, self.spec)

    def descramble_linear_lanes(self, w):
        """Descrambler with the seed contribution removed: maps an error pattern to its output errors."""
        if self.family is Family.GA_ADDITIVE:
            return np.array(w, copy=True)
        zero = ScramblerVariant(self.family, self.spec.with_seed([0] * self.spec.degree), self.two_pass)
        return zero.descramble_lanes(w)

    def scramble(self, x):
        return _apply(x, self.scramble_lanes)

    def descramble(self, r):
        return _apply(r, self.descramble_lanes)


GA_VARIANT = ScramblerVariant(Family.GA_ADDITIVE, GA_SPEC)
GB_VARIANT = ScramblerVariant(Family.GB_MULTIPLICATIVE, GA_SPEC)
PROPOSED_VARIANT = ScramblerVariant(Family.PROPOSED_TWO_PASS, PROPOSED_SPEC)
# the 7-cell experiments behind the single-pass and two-pass error sweeps
SWAPPED7_VARIANT = ScramblerVariant(Family.PROPOSED_TWO_PASS, GA_SPEC, two_pass=False)
PROPOSED7_VARIANT = ScramblerVariant(Family.PROPOSED_TWO_PASS, GA_SPEC)

VARIANTS = {v.name: v for v in (GA_VARIANT, GB_VARIANT, PROPOSED_VARIANT, SWAPPED7_VARIANT, PROPOSED7_VARIANT)}


def get_variant(name, seed=None):
    try:
        variant = VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {sorted(VARIANTS)}") from None
    if seed is not None:
        variant = ScramblerVariant(variant.family, variant.spec.with_seed(seed), variant.two_pass)
    return variant
