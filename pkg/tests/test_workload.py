import math

import pytest

from bwroute.network import shipped_topology
from bwroute.workload import (
    TraceParseError,
    WorkloadConfig,
    WorkloadError,
    dump_trace,
    gen_demands,
    load_trace,
    parse_trace,
    save_trace,
)


@pytest.fixture(scope="module")
def mira():
    return shipped_topology("mira")


def within_3_sigma(count, n, p):
    return abs(count - n * p) <= 3 * math.sqrt(n * p * (1 - p))


def test_static_trace_shape_and_menu_frequencies(mira):
    trace = gen_demands(WorkloadConfig("static", seed=3), mira.ie_pairs, mira.bandwidth_menu)
    assert len(trace) == 1000
    assert all(math.isinf(d.holding_time) for d in trace)
    assert [d.arrival_time for d in trace] == [float(i) for i in range(1000)]
    for b in mira.bandwidth_menu:
        assert within_3_sigma(sum(d.bandwidth == b for d in trace), 1000, 0.25)


def test_pair_frequencies_follow_weights(mira):
    trace = gen_demands(WorkloadConfig("static", count=5000, seed=9), mira.ie_pairs, mira.bandwidth_menu)
    for pair, p in zip(mira.pair_keys, (0.1, 0.2, 0.3, 0.4)):
        assert within_3_sigma(sum(d.pair == pair for d in trace), 5000, p)


def test_dynamic_means(mira):
    trace = gen_demands(
        WorkloadConfig("dynamic", arrival_rate=40, mean_holding=20, seed=0), mira.ie_pairs, mira.bandwidth_menu
    )
    assert len(trace) == 2000
    gaps = [b.arrival_time - a.arrival_time for a, b in zip(trace, trace[1:])]
    gaps.insert(0, trace[0].arrival_time)
    mean_gap = sum(gaps) / len(gaps)
    mean_hold = sum(d.holding_time for d in trace) / len(trace)
    assert abs(mean_gap - 1 / 40) <= 0.05 / 40
    assert abs(mean_hold - 20) <= 0.05 * 20
    assert all(b.arrival_time > a.arrival_time for a, b in zip(trace, trace[1:]))


def test_same_seed_same_bytes(mira):
    cfg = WorkloadConfig("dynamic", count=300, arrival_rate=80, mean_holding=30, seed=42)
    a = dump_trace(gen_demands(cfg, mira.ie_pairs, mira.bandwidth_menu))
    b = dump_trace(gen_demands(cfg, mira.ie_pairs, mira.bandwidth_menu))
    assert a == b
    c = dump_trace(gen_demands(WorkloadConfig("dynamic", count=300, seed=43), mira.ie_pairs, mira.bandwidth_menu))
    assert a != c


def test_config_errors(mira):
    with pytest.raises(WorkloadError):
        gen_demands(WorkloadConfig(), mira.ie_pairs, [])
    with pytest.raises(WorkloadError):
        WorkloadConfig("dynamic", arrival_rate=0)
    with pytest.raises(WorkloadError):
        WorkloadConfig("bursty")


def test_round_trip(tmp_path, mira):
    path = tmp_path / "trace.csv"
    save_trace([], path)
    assert path.read_text() == "id,arrival_time,ingress,egress,bandwidth,holding_time\n"
    assert load_trace(path) == []
    for scenario in ("static", "dynamic"):
        trace = gen_demands(WorkloadConfig(scenario, count=3, seed=1), mira.ie_pairs, mira.bandwidth_menu)
        save_trace(trace, path)
        assert load_trace(path) == trace


def test_parse_errors_carry_line_numbers():
    text = "id,arrival_time,ingress,egress,bandwidth,holding_time\n0,0.0,0,12,5,inf\n1,1.0,0,12,-5,inf\n"
    with pytest.raises(TraceParseError, match="line 3"):
        parse_trace(text)
    with pytest.raises(TraceParseError, match="line 2"):
        parse_trace("id,arrival_time,ingress,egress,bandwidth,holding_time\n0,x,0,12,5,inf\n")
    with pytest.raises(TraceParseError, match="line 1"):
        parse_trace("nope\n")
