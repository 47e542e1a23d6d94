"""Link burstiness from packet delivery traces.

The conditional packet delivery function (CPDF) gives the delivery probability
after a run of ``n`` deliveries (``n > 0``) or ``|n|`` losses (``n < 0``).
Burstiness is ``beta = (KW(I) - KW(E)) / KW(I)``, where ``KW(X)`` is the
distance of CPDF ``X`` from the ideal bursty link, ``E`` is the empirical
CPDF and ``I`` that of an independent link with the same reception ratio.
The distance is the mean absolute CPDF difference over the lags the
empirical CPDF supports.
"""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

DELIVERED, LOST = 1, 0
DEFAULT_MAX_LAG = 10
DEFAULT_MIN_SAMPLES = 20


class TraceFormatError(ValueError):
    pass


@dataclass
class DeliveryTrace:
    outcomes: np.ndarray  # uint8, 1 = delivered
    source: str = ""

    def __post_init__(self):
        self.outcomes = np.asarray(self.outcomes, np.uint8)
        if self.outcomes.size and self.outcomes.max() > 1:
            raise ValueError("outcomes must be 0/1")

    def __len__(self):
        return self.outcomes.size

    @property
    def prr(self):
        return float(self.outcomes.mean())

    def to_text(self, width=80):
        s = "".join("1" if o else "0" for o in self.outcomes)
        return "\n".join(s[i:i + width] for i in range(0, len(s), width)) + "\n"


def parse_trace(text, source="<string>"):
    """One character per packet, '1' delivered, '0' lost; '#' lines are comments."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        for col, ch in enumerate(line.rstrip("\r\n"), 1):
            if ch in "01":
                out.append(ch == "1")
            elif not ch.isspace():
                raise TraceFormatError(f"{source}:{lineno}:{col}: unexpected character {ch!r}")
    return DeliveryTrace(np.array(out, np.uint8), source)


def load_trace(path):
    with open(path) as fh:
        return parse_trace(fh.read(), str(path))


@dataclass
class Cpdf:
    values: dict  # lag -> conditional delivery probability
    samples: dict = field(default_factory=dict)  # lag -> support count; absent for analytic CPDFs

    @property
    def lags(self):
        return sorted(self.values)

    def restrict(self, lags):
        lags = [n for n in lags if n in self.values]
        return Cpdf({n: self.values[n] for n in lags}, {n: self.samples[n] for n in lags if n in self.samples})

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lag", "probability", "samples"])
        for n in self.lags:
            w.writerow([n, f"{self.values[n]:.6f}", self.samples.get(n, "")])
        return buf.getvalue()


def _run_lengths(o):
    """r[i] = length of the run of equal outcomes ending at i."""
    n = o.size
    starts = np.flatnonzero(np.r_[True, o[1:] != o[:-1]])
    idx = np.arange(n)
    return idx - starts[np.searchsorted(starts, idx, side="right") - 1] + 1


def empirical_cpdf(trace, max_lag=DEFAULT_MAX_LAG, min_samples=DEFAULT_MIN_SAMPLES):
    o = trace.outcomes
    if o.size == 0:
        raise ValueError("empty trace")
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if o.size < 2:
        return Cpdf({}, {})
    runs = np.minimum(_run_lengths(o)[:-1], max_lag)  # run ending just before each next outcome
    prev, nxt = o[:-1], o[1:]
    values, samples = {}, {}
    for state, sign in ((DELIVERED, 1), (LOST, -1)):
        sel = prev == state
        total = np.bincount(runs[sel], minlength=max_lag + 1)
        hits = np.bincount(runs[sel], weights=nxt[sel], minlength=max_lag + 1)
        # condition "previous n outcomes all equal state" == run length >= n
        tot_ge = np.cumsum(total[::-1])[::-1]
        hit_ge = np.cumsum(hits[::-1])[::-1]
        for n in range(1, max_lag + 1):
            if tot_ge[n] >= max(min_samples, 1):
                values[sign * n] = float(hit_ge[n] / tot_ge[n])
                samples[sign * n] = int(tot_ge[n])
    return Cpdf(values, samples)


def ideal_cpdfs(prr, max_lag=DEFAULT_MAX_LAG):
    """(independent link with this PRR, ideal bursty link)."""
    if not 0 <= prr <= 1:
        raise ValueError("prr must be in [0, 1]")
    lags = [n for n in range(-max_lag, max_lag + 1) if n]
    independent = Cpdf({n: float(prr) for n in lags})
    bursty = Cpdf({n: 1.0 if n > 0 else 0.0 for n in lags})
    return independent, bursty


def kw_distance(a, b):
    common = sorted(set(a.values) & set(b.values))
    if not common:
        raise ValueError("CPDFs share no supported lag")
    return float(np.mean([abs(a.values[n] - b.values[n]) for n in common]))


@dataclass
class BurstinessResult:
    prr: float
    kw_e: float
    kw_i: float
    beta: float
    cpdf: Cpdf = None

    def summary(self):
        text = f"prr {self.prr:.4f}\nKW(E) {self.kw_e:.6f}\nKW(I) {self.kw_i:.6f}\nbeta {self.beta:.4f}"
        if self.beta < 0:
            text += "\n(beta < 0: finite-sample effect, link indistinguishable from independent)"
        return text


def beta(trace, max_lag=DEFAULT_MAX_LAG, min_samples=DEFAULT_MIN_SAMPLES):
    e = empirical_cpdf(trace, max_lag, min_samples)
    prr = trace.prr
    if not e.values:
        raise ValueError("beta undefined: no lag has enough samples")
    independent, bursty = ideal_cpdfs(prr, max_lag)
    kw_i = kw_distance(independent.restrict(e.lags), bursty)
    if kw_i == 0:
        raise ValueError("beta undefined: KW(I) = 0 (trace reception ratio is 0 or 1)")
    kw_e = kw_distance(e, bursty)
    return BurstinessResult(prr, kw_e, kw_i, (kw_i - kw_e) / kw_i, e)


# -- synthetic traces ------------------------------------------------------------

@dataclass(frozen=True)
class IID:
    p: float


@dataclass(frozen=True)
class Gilbert:
    p_gg: float  # P(good -> good)
    p_bb: float  # P(bad -> bad)
    p_del_good: float = 1.0
    p_del_bad: float = 0.0


@dataclass(frozen=True)
class BurstyIdeal:
    prr: float
    run_scale: float = 1000.0  # mean cycle length (one delivery run + one loss run)


def _check_prob(*ps):
    for p in ps:
        if not 0 <= p <= 1:
            raise ValueError(f"probability out of range: {p}")


def generate_trace(kind, length, rng_seed):
    rng = np.random.default_rng(rng_seed)
    if isinstance(kind, IID):
        _check_prob(kind.p)
        out = (rng.random(length) < kind.p).astype(np.uint8)
    elif isinstance(kind, Gilbert):
        _check_prob(kind.p_gg, kind.p_bb, kind.p_del_good, kind.p_del_bad)
        u = rng.random(length)
        stay = np.array([kind.p_bb, kind.p_gg])  # indexed by state: 0 bad, 1 good
        # stationary start
        leave_g, leave_b = 1 - kind.p_gg, 1 - kind.p_bb
        pi_g = leave_b / (leave_g + leave_b) if leave_g + leave_b else 1.0
        state = np.empty(length, np.uint8)
        s = int(rng.random() < pi_g)
        for i in range(length):
            state[i] = s
            if u[i] >= stay[s]:
                s = 1 - s
        p_del = np.where(state == 1, kind.p_del_good, kind.p_del_bad)
        out = (rng.random(length) < p_del).astype(np.uint8)
    elif isinstance(kind, BurstyIdeal):
        _check_prob(kind.prr)
        mean_d = max(kind.run_scale * kind.prr, 1.0)
        mean_l = max(kind.run_scale * (1 - kind.prr), 1.0)
        chunks, total = [], 0
        while total < length:
            d = rng.geometric(1 / mean_d) if kind.prr > 0 else 0
            l = rng.geometric(1 / mean_l) if kind.prr < 1 else 0
            chunks.append(np.r_[np.ones(d, np.uint8), np.zeros(l, np.uint8)])
            total += d + l
        out = np.concatenate(chunks)[:length]
    else:
        raise TypeError(f"unknown trace kind {kind!r}")
    return DeliveryTrace(out, f"{kind} length={length} rng_seed={rng_seed}")
