"""Packet error and coverage analytics.

Block success probability for ``m`` packets over an independent channel is
(1 - P)^m.  The per-packet error rate P is either given directly or derived
from distance through a log-distance path loss, a link budget and a BER
curve.  Probabilities are handled in the log domain because Q of interest
goes down to 1e-30 and below.
"""
import configparser
import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize


class ThresholdUnreachable(ValueError):
    pass


@dataclass(frozen=True)
class PathLossModel:
    reference_loss_db: float = 40.05  # free space at 1 m, 2.4 GHz
    reference_distance_m: float = 1.0
    exponent: float = 3.5

    def __post_init__(self):
        if self.reference_distance_m <= 0:
            raise ValueError("reference distance must be > 0")
        if self.exponent < 1:
            raise ValueError("path loss exponent must be >= 1")

    def loss_db(self, d):
        d = np.asarray(d, float)
        if np.any(d <= 0):
            raise ValueError("distance must be > 0")
        return self.reference_loss_db + 10 * self.exponent * np.log10(d / self.reference_distance_m)


@dataclass(frozen=True)
class LinkBudget:
    transmit_power_dbm: float = 6.0
    noise_floor_dbm: float = -95.0
    coding_gain_db: float = 0.0
    payload_bytes: int = 200
    overhead_bytes: int = 28  # MAC header + FCS

    def __post_init__(self):
        if self.payload_bytes < 1:
            raise ValueError("payload_bytes must be >= 1")

    @property
    def packet_bits(self):
        return 8 * (self.payload_bytes + self.overhead_bytes)


@dataclass(frozen=True)
class BerCurve:
    """Piecewise-linear SNR (dB) -> log10(BER), extrapolated from the end segments."""

    snr_db: tuple
    log10_ber: tuple

    def __post_init__(self):
        s, b = np.asarray(self.snr_db, float), np.asarray(self.log10_ber, float)
        if s.size < 2 or s.shape != b.shape:
            raise ValueError("BER curve needs >= 2 matching points")
        if np.any(np.diff(s) <= 0):
            raise ValueError("BER curve SNR points must be strictly increasing")
        if np.any(np.diff(b) > 0):
            raise ValueError("BER curve must be nonincreasing in SNR")
        if np.any(b > math.log10(0.5)):
            raise ValueError("BER above 0.5")

    def log10(self, snr_db):
        s, b = np.asarray(self.snr_db, float), np.asarray(self.log10_ber, float)
        x = np.asarray(snr_db, float)
        y = np.interp(x, s, b)
        lo_slope = (b[1] - b[0]) / (s[1] - s[0])
        hi_slope = (b[-1] - b[-2]) / (s[-1] - s[-2])
        y = np.where(x < s[0], b[0] + lo_slope * (x - s[0]), y)
        y = np.where(x > s[-1], b[-1] + hi_slope * (x - s[-1]), y)
        return np.minimum(y, math.log10(0.5))

    def __call__(self, snr_db):
        return 10.0 ** self.log10(snr_db)


# 64-QAM rate 3/4 (54 Mb/s) in AWGN, coded; steepens with SNR like a waterfall
BER_54MBPS = BerCurve(
    snr_db=(12.0, 15.0, 17.5, 19.5, 21.0, 22.25, 23.25, 24.0),
    log10_ber=(-1.5, -2.5, -3.5, -4.5, -5.5, -6.5, -7.5, -8.5),
)


@dataclass(frozen=True)
class ChannelModel:
    """Either a fixed per-packet error rate (``per``) or a distance chain."""

    per: float = None
    path_loss: PathLossModel = None
    budget: LinkBudget = None
    ber_curve: BerCurve = None

    def __post_init__(self):
        if self.per is not None:
            if not 0 <= self.per <= 1:
                raise ValueError("per must be in [0, 1]")
        elif None in (self.path_loss, self.budget, self.ber_curve):
            raise ValueError("chain mode needs path_loss, budget and ber_curve")

    @classmethod
    def direct(cls, per):
        return cls(per=per)

    @property
    def is_chain(self):
        return self.per is None

    def snr_db(self, d):
        b = self.budget
        return b.transmit_power_dbm - self.path_loss.loss_db(d) - b.noise_floor_dbm + b.coding_gain_db

    def ber(self, d):
        if not self.is_chain:
            raise ValueError("bit error rate is undefined for a direct-P channel")
        return self.ber_curve(self.snr_db(d))

    def packet_bits(self, default=None):
        return self.budget.packet_bits if self.is_chain else default


def packet_error_rate(model, d=None):
    """P(packet has >= 1 bit error) at distance ``d``."""
    if not model.is_chain:
        return model.per
    if d is None or np.any(np.asarray(d) <= 0):
        raise ValueError("distance must be > 0")
    b = model.ber(d)
    # 1 - (1 - b)^bits without cancellation
    return -np.expm1(model.budget.packet_bits * np.log1p(-b))


def log10_block_success_probability(P, m):
    if m < 1:
        raise ValueError("m must be >= 1")
    P = np.asarray(P, float)
    if np.any((P < 0) | (P > 1)):
        raise ValueError("P must be in [0, 1]")
    with np.errstate(divide="ignore"):
        return m * np.log1p(-P) / math.log(10)


def block_success_probability(P, m):
    """Q = (1 - P)^m, evaluated as exp(m * log1p(-P))."""
    return 10.0 ** log10_block_success_probability(P, m)


def log10_q(model, m, d=None):
    return log10_block_success_probability(packet_error_rate(model, d), m)


def coverage_curve(model, m, d_grid):
    """[(d, Q, log10 Q), ...] along a strictly increasing distance grid."""
    d = np.asarray(d_grid, float)
    if d.size > 1 and np.any(np.diff(d) <= 0):
        raise ValueError("distance grid must be strictly increasing")
    lq = np.atleast_1d(log10_q(model, m, d) if model.is_chain else
                       np.full(d.shape, log10_block_success_probability(model.per, m)))
    return [(float(di), float(10.0 ** l), float(l)) for di, l in zip(d, lq)]


def coverage_csv(curves):
    """CSV for one or more curves given as {m: curve}."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    multi = len(curves) > 1
    w.writerow((["m"] if multi else []) + ["distance_m", "Q", "log10Q"])
    for m, curve in curves.items():
        for d, q, lq in curve:
            w.writerow(([m] if multi else []) + [f"{d:.6g}", f"{q:.6e}", f"{lq:.6f}"])
    return buf.getvalue()


@dataclass(frozen=True)
class ProtocolParams:
    m: int = 125
    L: int = 200  # payload bytes per packet
    R_b: float = 54e6
    T_r: float = 1.0
    Q_B: float = 0.1
    Q_E: float = 1e-30

    def __post_init__(self):
        if self.m < 1 or self.L < 1:
            raise ValueError("m and L must be >= 1")
        if not (0 < self.Q_E < 1 and 0 < self.Q_B <= 1):
            raise ValueError("thresholds out of range")
        if not self.Q_E < self.Q_B:
            raise ValueError("Q_E must be below Q_B")

    @property
    def block_bits(self):
        return 8 * self.m * self.L

    @property
    def airtime_s(self):
        return self.block_bits / self.R_b


def bootstrap_time(params, Q):
    """Expected key acquisition time (m*L*8/R_b + T_r) / Q."""
    if not 0 <= Q <= 1:
        raise ValueError("Q must be in [0, 1]")
    if Q == 0:
        raise ValueError("unreachable: Q = 0")
    return (params.airtime_s + params.T_r) / Q


def _bisect(f, lo, hi, tol):
    """Boundary of a predicate true at lo and false at hi; returns (last_true, first_false)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def secure_radii(model, params, d_min=0.01, d_max=1000.0, tol=0.01):
    """(d_bob_max, d_eve_min): last distance with Q >= Q_B, first with Q <= Q_E."""
    if not model.is_chain:
        raise ValueError("secure radii need a distance-dependent channel")
    lq = lambda d: float(log10_q(model, params.m, d))
    lqb, lqe = math.log10(params.Q_B), math.log10(params.Q_E)
    if not lq(d_min) >= lqb or lq(d_max) >= lqb:
        raise ThresholdUnreachable(f"threshold unreachable: Q_B={params.Q_B} not crossed in [{d_min}, {d_max}] m")
    if lq(d_min) <= lqe or not lq(d_max) <= lqe:
        raise ThresholdUnreachable(f"threshold unreachable: Q_E={params.Q_E} not crossed in [{d_min}, {d_max}] m")
    bob, _ = _bisect(lambda d: lq(d) >= lqb, d_min, d_max, tol)
    _, eve = _bisect(lambda d: lq(d) > lqe, d_min, d_max, tol)
    return bob, eve


def calibrate(model, distance_m, target_per):
    """Shift the lumped coding gain so that PER(distance_m) == target_per."""
    f = lambda g: float(packet_error_rate(replace(model, budget=replace(model.budget, coding_gain_db=g)), distance_m)) - target_per
    gain = optimize.brentq(f, -60.0, 60.0, xtol=1e-12)
    return replace(model, budget=replace(model.budget, coding_gain_db=gain))


# 54 Mb/s, L = 200 B, S_T = 6 dBm; coding gain fitted with calibrate() so that
# PER(10.5 m) = 0.43, just above the 1 - 1e-30**(1/125) ~= 0.4249 needed for
# Q < 1e-30 at m = 125
CALIBRATION_DISTANCE_M = 10.5
CALIBRATION_PER = 0.43
FITTED_CODING_GAIN_DB = -7.685847  # calibrate(..., 10.5, 0.43) on the defaults above

DEFAULT_CHAIN = ChannelModel(
    path_loss=PathLossModel(),
    budget=LinkBudget(coding_gain_db=FITTED_CODING_GAIN_DB),
    ber_curve=BER_54MBPS,
)


# -- config files -----------------------------------------------------------
#
# INI format:
#
#   [channel]           per = 0.3            (direct mode), or
#   [path_loss]         reference_loss_db, reference_distance_m, exponent
#   [budget]            transmit_power_dbm, noise_floor_dbm, coding_gain_db,
#                       payload_bytes, overhead_bytes
#   [ber_curve]         snr_db = 12, 15, ...   log10_ber = -1.5, -2.5, ...
#   [protocol]          m, L, R_b, T_r, Q_B, Q_E
#
# Missing chain sections fall back to the calibrated default profile.

def _section(cp, name, cls, conv):
    if not cp.has_section(name):
        return None
    return cls(**{k: conv[k](v) for k, v in cp.items(name)})


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


_PATH_LOSS_KEYS = dict(reference_loss_db=float, reference_distance_m=float, exponent=float)
_BUDGET_KEYS = dict(transmit_power_dbm=float, noise_floor_dbm=float, coding_gain_db=float,
                    payload_bytes=int, overhead_bytes=int)
_CURVE_KEYS = dict(snr_db=_floats, log10_ber=_floats)
_PROTOCOL_KEYS = dict(m=int, L=int, R_b=float, T_r=float, Q_B=float, Q_E=float)


def parse_config(text):
    """Parse an INI config into (ChannelModel, ProtocolParams)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(text)
    try:
        if cp.has_option("channel", "per"):
            model = ChannelModel.direct(cp.getfloat("channel", "per"))
        else:
            model = ChannelModel(
                path_loss=_section(cp, "path_loss", PathLossModel, _PATH_LOSS_KEYS) or DEFAULT_CHAIN.path_loss,
                budget=_section(cp, "budget", LinkBudget, _BUDGET_KEYS) or DEFAULT_CHAIN.budget,
                ber_curve=_section(cp, "ber_curve", BerCurve, _CURVE_KEYS) or DEFAULT_CHAIN.ber_curve,
            )
        params = _section(cp, "protocol", ProtocolParams, _PROTOCOL_KEYS) or ProtocolParams()
    except KeyError as exc:
        raise ValueError(f"unknown config key {exc.args[0]!r}") from None
    return model, params


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
