import csv
import json

import pytest

from bwroute.algorithms import ALGORITHMS
from bwroute.cli import fmt_fraction, main
from bwroute.workload import load_trace

DURATION_KEYS = {"mean_duration_ms", "learning_mean_duration_ms", "post_learning_mean_duration_ms"}


def strip_durations(obj):
    if isinstance(obj, dict):
        return {k: strip_durations(v) for k, v in obj.items() if k not in DURATION_KEYS}
    if isinstance(obj, list):
        return [strip_durations(v) for v in obj]
    return obj


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate_shipped(capsys):
    assert main(["validate", "--topo", "mira"]) == 0
    out = capsys.readouterr().out
    assert out.count("connected") == 4
    assert "|P_ie| =" in out


def test_validate_disconnected_pair(tmp_path, capsys):
    doc = {
        "nodes": 4,
        "links": [{"id": 0, "from": 0, "to": 1, "capacity": 5, "bidirectional": True}],
        "ie_pairs": [{"ingress": 0, "egress": 3}],
        "bandwidth_menu": [1],
    }
    topo = tmp_path / "t.json"
    topo.write_text(json.dumps(doc))
    assert main(["validate", "--topo", str(topo)]) == 1
    assert "(0, 3)" in capsys.readouterr().err


def test_validate_path_cap_guidance(capsys):
    assert main(["validate", "--topo", "cesnet", "--slack", "12", "--path-cap", "500"]) == 1
    assert "lower the hop slack" in capsys.readouterr().err


def test_run_single_algorithm(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--topo", "mira", "--algo", "TEARD", "--scenario", "static", "--count", "300",
               "--seed", "7", "--out", str(out)])
    assert rc == 0
    assert "acceptance" in capsys.readouterr().out
    rows = read_rows(out / "TEARD.csv")
    assert list(rows[0]) == ["demand_id", "outcome", "path_nodes", "weight_total", "duration_ns"]
    assert len(rows) == 300
    summary = json.loads((out / "TEARD.summary.json").read_text())
    assert summary["seed"] == 7 and summary["demands"] == 300
    assert summary["accepted"] == sum(r["outcome"] == "accepted" for r in rows)


def test_run_all_in_fixed_order(tmp_path):
    out = tmp_path / "all"
    assert main(["run", "--topo", "mira", "--algo", "all", "--count", "120", "--out", str(out),
                 "--checkpoints", "100,120"]) == 0
    with open(out / "comparison.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["NoD", *ALGORITHMS]
    assert [r[0] for r in rows[1:]] == ["100", "120"]
    for name in ALGORITHMS:
        assert (out / f"{name}.csv").exists()


def test_missing_topology_leaves_no_outputs(tmp_path, capsys):
    out = tmp_path / "none"
    assert main(["run", "--topo", str(tmp_path / "missing.json"), "--algo", "MHA", "--out", str(out)]) == 1
    assert "cannot read" in capsys.readouterr().err
    assert not out.exists()


def test_failed_publish_removes_partial_outputs(tmp_path, monkeypatch):
    from pathlib import Path

    out = tmp_path / "partial"
    real = Path.replace
    calls = []

    def flaky(self, target):
        calls.append(target)
        if len(calls) == 3:
            raise OSError("disk full")
        return real(self, target)

    monkeypatch.setattr(Path, "replace", flaky)
    rc = main(["run", "--topo", "mira", "--algo", "MHA,TEARD", "--count", "50", "--out", str(out)])
    assert rc == 1
    assert list(out.iterdir()) == []


def test_unknown_algorithm(tmp_path, capsys):
    assert main(["run", "--topo", "mira", "--algo", "OSPF", "--out", str(tmp_path)]) == 1
    assert "unknown algorithm" in capsys.readouterr().err


def test_bad_moderation_triple(tmp_path, capsys):
    rc = main(["run", "--topo", "mira", "--k1", "0.5", "--k2", "0.5", "--k3", "0.5", "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "sum to 1" in capsys.readouterr().err


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"topo": "mira", "algo": "MHA", "count": 40, "seed": 3}))
    monkeypatch.setenv("TE_SIM_SEED", "99")
    out = tmp_path / "a"
    assert main(["run", "--config", str(cfg), "--count", "25", "--out", str(out)]) == 0
    summary = json.loads((out / "MHA.summary.json").read_text())
    assert summary["demands"] == 25  # flag beats config
    assert summary["seed"] == 3  # config beats environment


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("TE_SIM_SEED", "11")
    assert main(["gen-trace", "--topo", "mira", "--count", "20", "--out", str(tmp_path / "a.csv")]) == 0
    assert main(["gen-trace", "--topo", "mira", "--count", "20", "--seed", "11", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    monkeypatch.setenv("TE_SIM_SEED", "abc")
    assert main(["gen-trace", "--topo", "mira", "--out", str(tmp_path / "c.csv")]) == 1


def test_gen_trace_then_replay(tmp_path):
    trace = tmp_path / "trace.csv"
    assert main(["gen-trace", "--topo", "ansnet", "--scenario", "dynamic", "--count", "200", "--seed", "2",
                 "--out", str(trace)]) == 0
    demands = load_trace(trace)
    assert len(demands) == 200 and all(d.holding_time < float("inf") for d in demands)
    out = tmp_path / "replay"
    assert main(["run", "--topo", "ansnet", "--algo", "BGMRA", "--trace", str(trace), "--out", str(out)]) == 0
    summary = json.loads((out / "BGMRA.summary.json").read_text())
    assert summary["workload"] == {"trace": str(trace)}
    assert summary["demands"] == 200


def test_sweep_outputs(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--topo", "mira", "--count", "200", "--seed", "1", "--step", "0.1", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 36
    pct = [float(r["acceptance_pct"]) for r in rows]
    assert pct == sorted(pct, reverse=True)
    assert [r["flag"] for r in rows[:3]] == ["top3"] * 3
    assert [r["flag"] for r in rows[-3:]] == ["bottom3"] * 3
    assert all(r["flag"] == "" for r in rows[3:-3])
    assert {(r["k1"], r["k2"], r["k3"]) for r in rows} >= {("0.3", "0.4", "0.3"), ("0.1", "0.1", "0.8")}


@pytest.mark.parametrize("step, n", [("1/3", 1), ("0.5", 0), ("0.25", 3)])
def test_sweep_grid_sizes(tmp_path, step, n):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--topo", "mira", "--count", "30", "--step", step, "--out", str(out)]) == 0
    assert len(read_rows(out)) == n


def test_sweep_bad_step(tmp_path, capsys):
    assert main(["sweep", "--topo", "mira", "--step", "0.3", "--out", str(tmp_path / "s.csv")]) == 1
    assert "does not divide 1" in capsys.readouterr().err


def test_fraction_formatting():
    from fractions import Fraction

    assert fmt_fraction(Fraction(3, 10)) == "0.3"
    assert fmt_fraction(Fraction(1, 4)) == "0.25"
    assert fmt_fraction(Fraction(1, 3)) == "1/3"


def test_repeat_runs_identical_except_durations(tmp_path):
    args = ["run", "--topo", "mira", "--algo", "ALL", "--scenario", "dynamic", "--count", "150", "--seed", "4"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--jobs", "2"]) == 0
    for name in ALGORITHMS:
        ra = [{k: v for k, v in r.items() if k != "duration_ns"} for r in read_rows(a / f"{name}.csv")]
        rb = [{k: v for k, v in r.items() if k != "duration_ns"} for r in read_rows(b / f"{name}.csv")]
        assert ra == rb
        sa = json.loads((a / f"{name}.summary.json").read_text())
        sb = json.loads((b / f"{name}.summary.json").read_text())
        assert strip_durations(sa) == strip_durations(sb)
