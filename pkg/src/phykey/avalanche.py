"""Error-propagation experiments for any scrambler variant.

Every variant is affine over GF(2), so the output error pattern caused by an
input error pattern does not depend on the message carried.  The all-zero
carrier is the default; ``random_carrier=True`` uses a random message as a
cross-check.
"""
import csv
import io
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from . import lanes as ln
from . import montecarlo


@dataclass
class PropagationCurve:
    n: int
    variant: object
    points: list  # (error_position, output_errors)

    @property
    def errors(self):
        return np.array([e for _, e in self.points])

    def to_csv(self, header_comment=None):
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "output_errors"])
        w.writerows(self.points)
        return buf.getvalue()


@dataclass
class ErrorHistogram:
    n: int
    trials: int
    counts: dict  # output-error count -> frequency
    mean: float = field(init=False)
    std: float = field(init=False)

    def __post_init__(self):
        vals = np.array(sorted(self.counts), dtype=float)
        freq = np.array([self.counts[v] for v in sorted(self.counts)], dtype=float)
        self.mean = float((vals * freq).sum() / freq.sum())
        self.std = float(np.sqrt((freq * (vals - self.mean) ** 2).sum() / freq.sum()))

    def to_csv(self, header_comment=None):
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["output_errors", "frequency"])
        w.writerows(sorted(self.counts.items()))
        return buf.getvalue()


@dataclass
class UniformityResult:
    rates: np.ndarray  # per-position probability of an output error
    chi2: float
    dof: int
    p_value: float

    def within(self, lo=0.45, hi=0.55):
        return bool(((self.rates >= lo) & (self.rates <= hi)).all())

    @property
    def uniform(self):
        return self.within() and self.p_value > 1e-3


def _carrier(n, rng, random_carrier):
    if random_carrier:
        return rng.integers(0, 2, n, dtype=np.uint8)
    return np.zeros(n, np.uint8)


def _output_error_lanes(variant, message, err):
    """Descramble scramble(message) ^ err for each error row; return diff lanes."""
    lanes = err.shape[1]
    sent = variant.scramble(message)
    received = ln.broadcast(sent, lanes) ^ err
    return variant.descramble_lanes(received) ^ ln.broadcast(message, lanes)


def _error_lanes(n, rows_positions, lanes):
    """Lane batch with row r flipped at rows_positions[r]."""
    err = np.zeros((n, lanes), np.uint64)
    for r, pos in enumerate(rows_positions):
        err[pos, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    return err


def sweep_single_error(variant, n, message=None, random_carrier=False, rng_seed=0):
    """Output error count for a single input error at every position."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if message is None:
        message = _carrier(n, np.random.default_rng(rng_seed), random_carrier)
    message = np.asarray(message, np.uint8)
    if message.shape != (n,):
        raise ValueError("message length must equal n")
    points = []
    for start, size in montecarlo.plan(n):
        pos = np.arange(start, start + size)
        err = _error_lanes(n, [[p] for p in pos], ln.n_lanes(size))
        counts = ln.row_weights(_output_error_lanes(variant, message, err), size)
        points.extend(zip(pos.tolist(), counts.tolist()))
    return PropagationCurve(n, variant, points)


def _distribution_chunk(variant, n, k_errors, random_carrier, rng, size):
    message = _carrier(n, rng, random_carrier)
    positions = [rng.choice(n, k_errors, replace=False) for _ in range(size)]
    diff = _output_error_lanes(variant, message, _error_lanes(n, positions, ln.n_lanes(size)))
    return ln.row_weights(diff, size), ln.position_counts(diff, size)


def _run_trials(variant, n, k_errors, trials, rng_seed, jobs, random_carrier):
    chunks = montecarlo.plan(trials)
    rngs = montecarlo.chunk_rngs(rng_seed, len(chunks))
    fn = partial(_distribution_chunk, variant, n, k_errors, random_carrier)
    return montecarlo.run(fn, [(rng, size) for rng, (_, size) in zip(rngs, chunks)], jobs)


def error_distribution(variant, n, k_errors, trials, rng_seed, jobs=1, random_carrier=False):
    """Histogram of output error counts for ``k_errors`` random input errors."""
    if not 1 <= k_errors <= n:
        raise ValueError("need 1 <= k_errors <= n")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = _run_trials(variant, n, k_errors, trials, rng_seed, jobs, random_carrier)
    all_counts = np.concatenate([r[0] for r in results])
    vals, freq = np.unique(all_counts, return_counts=True)
    return ErrorHistogram(n, trials, dict(zip(vals.tolist(), freq.tolist())))


def uniformity_test(variant, n, trials, rng_seed, jobs=1, k_errors=1):
    """Per-position output error rate under random single errors, chi-square vs 1/2."""
    if trials < 10 * n:
        raise ValueError("uniformity_test needs trials >= 10*n")
    results = _run_trials(variant, n, k_errors, trials, rng_seed, jobs, False)
    hits = np.sum([r[1] for r in results], axis=0)
    rates = hits / trials
    expected = trials / 2
    chi2 = float((2 * (hits - expected) ** 2 / expected).sum())
    return UniformityResult(rates, chi2, n, float(stats.chi2.sf(chi2, n)))
