"""Broadcast key bootstrap over a lossy channel.

The access point packs the key seed, random filler and a CRC-32 into one
payload, scrambles it as a single unit (so the scrambler state runs on across
packet boundaries) and splits it into ``m`` packets.  A receiver recovers the
seed only if the descrambled payload passes the CRC.

Reference path: :func:`encode_key_block`, :func:`transmit`,
:func:`decode_key_block` operate on one concrete block.

Monte Carlo path: every scrambler variant and CRC-32 are affine over GF(2),
so descrambling ``sent ^ e`` yields ``payload ^ D0(e)`` where ``D0`` is the
descrambler with an all-zero seed, and the CRC verdict depends only on
``D0(e)``.  :func:`simulate_bootstrap` and :func:`leakage_report` therefore
push error patterns alone through the bit-sliced kernels, 64 receptions per
word.  ``tests/test_protocol.py`` checks this against the reference path.
"""
import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from . import lanes as ln
from . import montecarlo
from .bits import crc32_bits, random_bits
from .channel import block_success_probability, packet_error_rate
from .scrambler import PROPOSED_VARIANT

log = logging.getLogger(__name__)

SEED_BITS = 32
CRC_BITS = 32
LEAK_ALARM_FRACTION = 0.25
PACKET, BIT = "packet", "bit"


def generate_seed(rng):
    """Uniform nonzero 32-bit key seed."""
    while True:
        seed = random_bits(rng, SEED_BITS)
        if seed.any():
            return seed


@dataclass
class KeyBlock:
    payload: np.ndarray  # seed | filler | crc, unscrambled
    packets: np.ndarray  # (m, 8L) scrambled

    @property
    def bits(self):
        return self.packets.reshape(-1)


@dataclass
class DecodeResult:
    seed: np.ndarray = None  # None means no key
    payload: np.ndarray = None
    bit_error_fraction: float = None

    @property
    def success(self):
        return self.seed is not None


def encode_key_block(seed, params, variant=PROPOSED_VARIANT, rng=None):
    rng = np.random.default_rng() if rng is None else rng
    n = params.block_bits
    if n < SEED_BITS + CRC_BITS:
        raise ValueError(f"block of {n} bits cannot carry a {SEED_BITS}-bit seed and CRC-32")
    seed = np.asarray(seed, np.uint8)
    if seed.shape != (SEED_BITS,):
        raise ValueError(f"seed must have {SEED_BITS} bits")
    body = np.concatenate([seed, random_bits(rng, n - SEED_BITS - CRC_BITS)])
    payload = np.concatenate([body, crc32_bits(body)])
    packets = variant.scramble(payload).reshape(params.m, 8 * params.L)
    return KeyBlock(payload, packets)


def decode_key_block(received, params, variant=PROPOSED_VARIANT, reference=None):
    """Descramble, check the CRC and return the seed or no key.

    ``reference`` (the true payload) only feeds the leakage statistic.
    """
    payload = variant.descramble(np.asarray(received.packets, np.uint8).reshape(-1))
    body, crc = payload[:-CRC_BITS], payload[-CRC_BITS:]
    fraction = None
    if reference is not None:
        fraction = float(np.count_nonzero(payload != reference)) / payload.size
    if np.array_equal(crc32_bits(body), crc):
        return DecodeResult(payload[:SEED_BITS].copy(), payload, fraction)
    return DecodeResult(None, payload, fraction)


# -- channel --------------------------------------------------------------------

class FlipSampler:
    """Bit flips of one packet: none with prob 1 - per, else k >= 1 uniform positions.

    k follows Binomial(bits, b) conditioned on k >= 1 where b is chosen so
    that P(k >= 1) equals the packet error rate.
    """

    def __init__(self, bits, per):
        self.bits = bits
        self.per = float(per)
        if self.per > 0:
            b = -np.expm1(np.log1p(-self.per) / bits) if self.per < 1 else 1.0
            pmf = stats.binom.pmf(np.arange(1, bits + 1), bits, b)
            cdf = np.cumsum(pmf)
            self._cdf = cdf / cdf[-1]

    def erred(self, rng, m):
        return rng.random(m) < self.per

    def flips(self, rng):
        k = int(np.searchsorted(self._cdf, rng.random(), side="right")) + 1
        return distinct(rng, self.bits, min(k, self.bits))


def distinct(rng, n, k):
    """k distinct integers from range(n), uniformly."""
    if 4 * k < n:
        while True:
            out = rng.integers(0, n, k)
            if np.unique(out).size == k:
                return out
    return rng.choice(n, k, replace=False)


def _bit_ber(model, d):
    if not model.is_chain:
        raise ValueError("bit granularity needs a chain channel model (BER is undefined in direct mode)")
    return float(model.ber(d))


def _draw_errors(rng, params, model, d, granularity, sampler):
    """Flip positions (block coordinates) and per-packet error flags for one reception."""
    bits = 8 * params.L
    if granularity == BIT:
        # errors land anywhere in the frame; a frame hit only outside the
        # payload is dropped, which costs the receiver as much as a corrupted
        # payload, so it keeps one payload flip
        frame = max(model.packet_bits(bits), bits)
        total = rng.binomial(frame, _bit_ber(model, d), params.m)
        counts = rng.hypergeometric(bits, frame - bits, total) if frame > bits else total
        flags = total > 0
        counts = np.where(flags, np.maximum(counts, 1), 0)
        pos = [i * bits + distinct(rng, bits, int(c)) for i, c in enumerate(counts) if c]
    else:
        flags = sampler.erred(rng, params.m)
        pos = [i * bits + sampler.flips(rng) for i in np.flatnonzero(flags)]
    return (np.concatenate(pos) if pos else np.empty(0, np.int64)), flags


def transmit(block, model, d, rng, params, granularity=PACKET):
    """Send a block through the channel; returns (received block, per-packet error flags)."""
    if granularity not in (PACKET, BIT):
        raise ValueError(f"granularity must be {PACKET!r} or {BIT!r}")
    sampler = None
    if granularity == PACKET:
        sampler = FlipSampler(8 * params.L, packet_error_rate(model, d))
    pos, flags = _draw_errors(rng, params, model, d, granularity, sampler)
    bits = block.bits.copy()
    bits[pos] ^= 1
    return KeyBlock(block.payload, bits.reshape(block.packets.shape)), flags


# -- Monte Carlo engine -----------------------------------------------------------

def _crc_offset(n):
    """All-zero body with its CRC: the affine offset of the CRC check."""
    z = np.zeros(n, np.uint8)
    z[-CRC_BITS:] = crc32_bits(z[:-CRC_BITS])
    return z


def evaluate_errors(variant, n, error_positions):
    """Decode outcome of each error pattern in a batch.

    Returns (crc_ok, payload_errors, seed_errors, diff_lanes) where
    ``payload_errors`` counts descrambled bits that differ from the payload.
    """
    rows = len(error_positions)
    lanes = ln.n_lanes(rows)
    err = np.zeros((n, lanes), np.uint64)
    for r, pos in enumerate(error_positions):
        err[pos, r >> 6] ^= np.uint64(1) << np.uint64(r & 63)
    diff = variant.descramble_linear_lanes(err)
    ok = ln.crc_ok(diff ^ ln.broadcast(_crc_offset(n), lanes), rows)
    weights = ln.row_weights(diff, rows)
    seed_err = ln.row_weights(diff, rows, 0, SEED_BITS)
    return ok, weights, seed_err, diff


@dataclass
class BootstrapResult:
    trials: int
    attempts: np.ndarray  # per trial; 0 for capped trials
    capped: int
    q_hat: float
    q_first: float
    t_b_hat: float
    t_b_se: float
    q_analytic: float
    t_b_analytic: float
    false_accepts: int
    eve_fraction_mean: float
    histogram: dict = field(default_factory=dict)

    def summary(self):
        lines = [
            f"trials            {self.trials} ({self.capped} capped)",
            f"Q analytic        {self.q_analytic:.6g}",
            f"Q_hat 1/mean      {self.q_hat:.6g}",
            f"Q_hat first try   {self.q_first:.6g}",
            f"T_B analytic [s]  {self.t_b_analytic:.6g}",
            f"T_B_hat [s]       {self.t_b_hat:.6g} +- {self.t_b_se:.3g}",
            f"false accepts     {self.false_accepts}",
        ]
        if self.eve_fraction_mean is not None:
            lines.append(f"mean failed-decode bit error fraction {self.eve_fraction_mean:.4f}")
        return "\n".join(lines)


def _bootstrap_chunk(params, model, d, variant, granularity, max_attempts, rng, size):
    n = params.block_bits
    sampler = FlipSampler(8 * params.L, packet_error_rate(model, d)) if granularity == PACKET else None
    attempts = np.zeros(size, np.int64)
    active = np.arange(size)
    false_accepts = 0
    frac_sum, frac_count = 0.0, 0
    for attempt in range(1, max_attempts + 1):
        if active.size == 0:
            break
        patterns = [_draw_errors(rng, params, model, d, granularity, sampler)[0] for _ in active]
        hit = np.array([p.size > 0 for p in patterns], bool)
        done = ~hit
        if hit.any():
            idx = np.flatnonzero(hit)
            ok, weights, seed_err, _ = evaluate_errors(variant, n, [patterns[i] for i in idx])
            done[idx] = ok
            false_accepts += int(np.count_nonzero(ok & (seed_err > 0)))
            failed = weights[~ok]
            frac_sum += float(failed.sum()) / n
            frac_count += failed.size
        attempts[active[done]] = attempt
        active = active[~done]
    return attempts, false_accepts, frac_sum, frac_count


def simulate_bootstrap(params, model, d=None, variant=PROPOSED_VARIANT, trials=1000, rng_seed=0,
                       max_attempts=10_000, granularity=PACKET, jobs=1):
    """Monte Carlo of repeated key broadcasts until each trial decodes the key.

    Each attempt costs one repetition period plus the block air time, so the
    mean elapsed time estimates (m*L*8/R_b + T_r) / Q.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    log.info("simulate_bootstrap params=%s model=%s d=%s variant=%s trials=%d rng_seed=%d",
             params, model, d, variant.name, trials, rng_seed)
    chunks = montecarlo.plan(trials, 1024)
    rngs = montecarlo.chunk_rngs(rng_seed, len(chunks))
    fn = partial(_bootstrap_chunk, params, model, d, variant, granularity, max_attempts)
    parts = montecarlo.run(fn, [(r, s) for r, (_, s) in zip(rngs, chunks)], jobs)
    attempts = np.concatenate([p[0] for p in parts])
    done = attempts[attempts > 0]
    capped = int(np.count_nonzero(attempts == 0))
    per_attempt = params.T_r + params.airtime_s
    mean_a = done.mean() if done.size else float("nan")
    q = float(block_success_probability(packet_error_rate(model, d), params.m))
    frac_sum = sum(p[2] for p in parts)
    frac_count = sum(p[3] for p in parts)
    vals, freq = np.unique(done, return_counts=True)
    return BootstrapResult(
        trials=trials,
        attempts=attempts,
        capped=capped,
        q_hat=float(1 / mean_a),
        q_first=float(np.count_nonzero(attempts == 1) / trials),
        t_b_hat=float(mean_a * per_attempt),
        t_b_se=float(done.std(ddof=1) * per_attempt / np.sqrt(done.size)) if done.size > 1 else float("nan"),
        q_analytic=q,
        t_b_analytic=per_attempt / q if q > 0 else float("inf"),
        false_accepts=sum(p[1] for p in parts),
        eve_fraction_mean=frac_sum / frac_count if frac_count else None,
        histogram=dict(zip(vals.tolist(), freq.tolist())),
    )


@dataclass
class LeakageReport:
    trials: int
    failed: int
    fractions: np.ndarray  # payload bit error fraction of each failed decode
    alarm: bool  # some failed decode kept more than 3/4 of the payload intact
    chi2: float
    dof: int
    p_value: float

    @property
    def mean(self):
        return float(self.fractions.mean()) if self.failed else float("nan")

    @property
    def std(self):
        return float(self.fractions.std()) if self.failed else float("nan")

    def share_within(self, lo=0.45, hi=0.55):
        if not self.failed:
            return float("nan")
        return float(np.count_nonzero((self.fractions >= lo) & (self.fractions <= hi)) / self.failed)


def _leakage_chunk(params, model, d, variant, corrupted_packets, rng, size):
    n = params.block_bits
    bits = 8 * params.L
    sampler = FlipSampler(bits, packet_error_rate(model, d))
    patterns = []
    for _ in range(size):
        if corrupted_packets is None:
            patterns.append(_draw_errors(rng, params, model, d, PACKET, sampler)[0])
        else:
            # chosen packets are erred for sure; flips keep the channel's statistics
            which = distinct(rng, params.m, corrupted_packets)
            patterns.append(np.concatenate([i * bits + sampler.flips(rng) for i in which]))
    hit = [i for i, p in enumerate(patterns) if p.size]
    if not hit:
        return np.empty(0), np.zeros(n, np.int64)
    ok, weights, _, diff = evaluate_errors(variant, n, [patterns[i] for i in hit])
    failed_rows = np.zeros(diff.shape[1], np.uint64)
    for r in np.flatnonzero(~ok):
        failed_rows[r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    counts = ln.position_counts(diff & failed_rows[None, :], len(hit))
    return weights[~ok] / n, counts


def leakage_report(params, model, d_eve=None, variant=PROPOSED_VARIANT, trials=1000, rng_seed=0,
                   corrupted_packets=None, jobs=1):
    """Payload bit error fraction seen by a receiver whose decode fails.

    With ``corrupted_packets`` set, every trial corrupts exactly that many
    randomly chosen packets instead of sampling the channel.
    """
    if float(packet_error_rate(model, d_eve)) == 0:
        raise ValueError("Q(d_eve) must be below 1 for leakage to be measurable")
    if corrupted_packets is not None and not 1 <= corrupted_packets <= params.m:
        raise ValueError("corrupted_packets must be in [1, m]")
    chunks = montecarlo.plan(trials, 1024)
    rngs = montecarlo.chunk_rngs(rng_seed, len(chunks))
    fn = partial(_leakage_chunk, params, model, d_eve, variant, corrupted_packets)
    parts = montecarlo.run(fn, [(r, s) for r, (_, s) in zip(rngs, chunks)], jobs)
    fractions = np.concatenate([p[0] for p in parts])
    counts = np.sum([p[1] for p in parts], axis=0)
    failed = fractions.size
    if failed:
        expected = failed / 2
        chi2 = float((2 * (counts - expected) ** 2 / expected).sum())
        p_value = float(stats.chi2.sf(chi2, counts.size))
    else:
        chi2, p_value = float("nan"), float("nan")
    alarm = bool(failed and fractions.min() < LEAK_ALARM_FRACTION)
    return LeakageReport(trials, failed, fractions, alarm, chi2, counts.size, p_value)
