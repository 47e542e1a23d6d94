import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phykey import burstiness as bu


def _cpdf_brute(o, lag):
    # direct count: windows of |lag| equal outcomes followed by a delivery
    state = 1 if lag > 0 else 0
    k = abs(lag)
    tot = hit = 0
    for i in range(k, len(o)):
        if all(v == state for v in o[i - k:i]):
            tot += 1
            hit += o[i]
    return tot, hit


@given(st.lists(st.integers(0, 1), min_size=2, max_size=300))
@settings(max_examples=80, deadline=None)
def test_cpdf_matches_window_count(o):
    c = bu.empirical_cpdf(bu.DeliveryTrace(o), max_lag=6, min_samples=1)
    for lag in [n for n in range(-6, 7) if n]:
        tot, hit = _cpdf_brute(o, lag)
        if tot:
            assert c.samples[lag] == tot
            assert c.values[lag] == pytest.approx(hit / tot)
        else:
            assert lag not in c.values


def test_alternating_trace():
    c = bu.empirical_cpdf(bu.DeliveryTrace([1, 0] * 100), max_lag=3, min_samples=1)
    assert c.values == {1: 0.0, -1: 1.0}


@given(st.lists(st.integers(0, 1), min_size=50, max_size=400).filter(lambda o: 0 < sum(o) < len(o)))
@settings(max_examples=50, deadline=None)
def test_beta_at_most_one(o):
    try:
        r = bu.beta(bu.DeliveryTrace(o), min_samples=1)
    except ValueError:
        return
    assert r.beta <= 1 + 1e-12
    assert r.kw_e >= 0 and r.kw_i > 0


def test_ideal_cpdfs():
    i, b = bu.ideal_cpdfs(0.7, 2)
    assert i.values == {-2: 0.7, -1: 0.7, 1: 0.7, 2: 0.7}
    assert b.values == {-2: 0.0, -1: 0.0, 1: 1.0, 2: 1.0}
    assert bu.kw_distance(i, b) == pytest.approx(0.5)


def test_beta_endpoints():
    iid = bu.beta(bu.generate_trace(bu.IID(0.8), 100_000, 0))
    assert abs(iid.beta) <= 0.05
    bursty = bu.beta(bu.generate_trace(bu.BurstyIdeal(0.8), 100_000, 0))
    assert bursty.beta >= 0.95


def test_gilbert_monotone():
    b = [bu.beta(bu.generate_trace(bu.Gilbert(p, p), 100_000, 4)).beta for p in (0.5, 0.9, 0.99)]
    assert b[0] < b[1] < b[2]


def test_beta_undefined_for_constant_trace():
    with pytest.raises(ValueError, match="undefined"):
        bu.beta(bu.DeliveryTrace(np.ones(500, np.uint8)))
    with pytest.raises(ValueError, match="empty"):
        bu.empirical_cpdf(bu.DeliveryTrace([]))


def test_negative_beta_flagged():
    r = bu.BurstinessResult(0.5, 0.6, 0.5, -0.2)
    assert "finite-sample" in r.summary()


def test_parse_trace_errors_name_line_and_column():
    with pytest.raises(bu.TraceFormatError, match=r"t.txt:3:4"):
        bu.parse_trace("# header\n1101\n 10x1\n", "t.txt")


def test_trace_text_round_trip(tmp_path):
    tr = bu.generate_trace(bu.Gilbert(0.9, 0.8), 333, 2)
    f = tmp_path / "t.txt"
    f.write_text(tr.to_text(40))
    assert np.array_equal(bu.load_trace(f).outcomes, tr.outcomes)


def test_generators_deterministic_and_prr():
    a = bu.generate_trace(bu.Gilbert(0.95, 0.8), 50_000, 7)
    b = bu.generate_trace(bu.Gilbert(0.95, 0.8), 50_000, 7)
    assert np.array_equal(a.outcomes, b.outcomes)
    # stationary good-state share (1 - p_bb) / (2 - p_gg - p_bb) = 0.8
    assert a.prr == pytest.approx(0.8, abs=0.02)
    with pytest.raises(ValueError):
        bu.generate_trace(bu.IID(1.5), 10, 0)


def test_cpdf_csv():
    c = bu.empirical_cpdf(bu.DeliveryTrace([1, 1, 0, 1, 1, 1, 0, 0]), max_lag=2, min_samples=1)
    lines = c.to_csv().splitlines()
    assert lines[0] == "lag,probability,samples"
    assert len(lines) == 1 + len(c.values)
