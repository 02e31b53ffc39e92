"""Command-line entry point: ``bwroute validate | gen-trace | run | sweep``.

Option values are resolved in this order: command-line flag, then the JSON
file given with ``--config``, then the built-in default. The seed has one more
fallback, the ``TE_SIM_SEED`` environment variable, between the config file
and the default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .algorithms import ALGORITHMS, AlgorithmConfig, ConfigError
from .network import SHIPPED_TOPOLOGIES, TopologyError, load_topology, shipped_topology
from .paths import DEFAULT_PATH_CAP, DEFAULT_SLACK, CatalogError, build_criticality_table
from .simulation import DEFAULT_WINDOW, SetupError, compare_algorithms, simplex_grid, sweep_teard
from .workload import WorkloadConfig, WorkloadError, dump_trace, gen_demands, load_trace

SEED_ENV = "TE_SIM_SEED"
DEMAND_HEADER = ["demand_id", "outcome", "path_nodes", "weight_total", "duration_ns"]
SWEEP_HEADER = ["rank", "k1", "k2", "k3", "acceptance_pct", "flag"]

DEFAULTS = {
    "algo": "TEARD",
    "scenario": "static",
    "count": None,
    "window": DEFAULT_WINDOW,
    "stride": 1,
    "step": "0.1",
    "jobs": 1,
    "slack": DEFAULT_SLACK,
    "path_cap": DEFAULT_PATH_CAP,
    "checkpoints": None,
}


class CliError(Exception):
    pass


class Options:
    """Merged view of parsed flags, the optional config file and defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: dict = {}
        if getattr(args, "config", None):
            try:
                self.file = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise CliError(f"config {args.config}: {exc}") from exc
            if not isinstance(self.file, dict):
                raise CliError(f"config {args.config}: top level must be an object")

    def get(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.file:
            return self.file[name]
        if name.replace("_", "-") in self.file:
            return self.file[name.replace("_", "-")]
        return DEFAULTS.get(name, default)

    def seed(self) -> int:
        value = getattr(self.args, "seed", None)
        if value is None:
            value = self.file.get("seed")
        if value is None and os.environ.get(SEED_ENV, "").strip():
            value = os.environ[SEED_ENV].strip()
        try:
            return int(value) if value is not None else 0
        except ValueError:
            raise CliError(f"seed must be an integer, got {value!r}") from None


def resolve_topology(ref: str):
    if ref is None:
        raise CliError("no topology given (use --topo or a 'topo' entry in --config)")
    if Path(ref).exists():
        return load_topology(Path(ref))
    key = ref.lower().removesuffix(".json").removesuffix("-like")
    if key in SHIPPED_TOPOLOGIES:
        return shipped_topology(key)
    return load_topology(Path(ref))


def algorithm_configs(opts: Options) -> list[AlgorithmConfig]:
    names = opts.get("algo")
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    names = [n.upper() for n in names]
    if "ALL" in names:
        names = list(ALGORITHMS)
    params = {k: opts.file[k] for k in ("teard", "rrate", "mira") if k in opts.file}
    for flag in ("k1", "k2", "k3"):
        if getattr(opts.args, flag, None) is not None:
            params.setdefault("teard", {})
            params["teard"] = {**params["teard"], flag: Fraction(getattr(opts.args, flag))}
    configs = []
    for name in names:
        if name not in ALGORITHMS:
            raise CliError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)} or ALL")
        configs.append(AlgorithmConfig.from_dict({"algorithm": name, **params}))
    return configs


def workload_config(opts: Options, topology) -> WorkloadConfig:
    dyn = topology.document.get("dynamic", {}) if isinstance(topology.document, dict) else {}
    return WorkloadConfig(
        scenario=opts.get("scenario"),
        count=opts.get("count"),
        arrival_rate=float(opts.get("rate", dyn.get("arrival_rate", 40.0))),
        mean_holding=float(opts.get("holding", dyn.get("mean_holding", 20.0))),
        seed=opts.seed(),
    )


def load_or_generate(opts: Options, topology):
    trace_path = opts.get("trace")
    if trace_path:
        try:
            return load_trace(trace_path), {"trace": str(trace_path)}
        except OSError as exc:
            raise CliError(f"cannot read trace {trace_path}: {exc.strerror or exc}") from exc
    cfg = workload_config(opts, topology)
    trace = gen_demands(cfg, topology.ie_pairs, topology.bandwidth_menu)
    echo = {
        "scenario": cfg.scenario,
        "count": cfg.n_demands,
        "seed": cfg.seed,
    }
    if cfg.scenario == "dynamic":
        echo.update(arrival_rate=cfg.arrival_rate, mean_holding=cfg.mean_holding)
    return trace, echo


class Outputs:
    """Stage files in memory, then publish them all by temp-file rename.

    If anything goes wrong while publishing, files written so far are removed.
    """

    def __init__(self):
        self.files: list[tuple[Path, str]] = []

    def add(self, path: Path, text: str) -> None:
        self.files.append((Path(path), text))

    def commit(self) -> None:
        done: list[Path] = []
        try:
            for path, text in self.files:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_name(f".{path.name}.tmp")
                tmp.write_text(text)
                tmp.replace(path)
                done.append(path)
        except BaseException:
            for path in done:
                path.unlink(missing_ok=True)
            for path, _ in self.files:
                path.with_name(f".{path.name}.tmp").unlink(missing_ok=True)
            raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt_weight(w) -> str:
    if w is None:
        return ""
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def demand_csv(result) -> str:
    rows = [
        [
            r.demand_id,
            "accepted" if r.accepted else "rejected",
            "-".join(map(str, r.path_nodes)),
            _fmt_weight(r.weight),
            r.duration_ns,
        ]
        for r in result.records
    ]
    return _csv_text(DEMAND_HEADER, rows)


def fmt_fraction(x: Fraction) -> str:
    """Decimal text when exact, otherwise ``p/q``."""
    x = Fraction(x)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = 0
    while (x * 10**digits).denominator != 1:
        digits += 1
    return f"{float(x):.{max(digits, 1)}f}"


def default_checkpoints(total: int) -> list[int]:
    marks = list(range(100, total + 1, 100))
    if total and (not marks or marks[-1] != total):
        marks.append(total)
    return marks


def parse_checkpoints(value, total: int) -> list[int]:
    if value is None:
        return default_checkpoints(total)
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        marks = [int(v) for v in value]
    except ValueError:
        raise CliError(f"checkpoints must be integers, got {value!r}") from None
    if any(m <= 0 for m in marks):
        raise CliError("checkpoints must be positive")
    return marks


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- commands ---------------------------------------------------------------


def cmd_validate(opts: Options) -> int:
    topo = resolve_topology(opts.get("topo"))
    g = topo.graph
    print(f"topology {topo.name}: {g.n_nodes} nodes, {g.n_links} directed links, {len(topo.ie_pairs)} ie pairs")
    cap = int(opts.get("path_cap"))
    table = build_criticality_table(g, topo.pair_keys, slack=int(opts.get("slack")), path_cap=cap)
    for pair, count, limit in zip(table.pairs, table.path_counts, table.hop_limits):
        print(f"pair {pair[0]}->{pair[1]}: connected, hop limit {limit}, |P_ie| = {count}")
        if count > cap // 2:
            print(
                f"warning: pair {pair[0]}->{pair[1]} enumerates {count} paths, over half the cap of {cap}; "
                "consider lowering the hop slack",
                file=sys.stderr,
            )
    print("ok")
    return 0


def cmd_gen_trace(opts: Options) -> int:
    topo = resolve_topology(opts.get("topo"))
    out = opts.get("out")
    if not out:
        raise CliError("gen-trace needs --out")
    cfg = workload_config(opts, topo)
    trace = gen_demands(cfg, topo.ie_pairs, topo.bandwidth_menu)
    outputs = Outputs()
    outputs.add(Path(out), dump_trace(trace))
    outputs.commit()
    print(f"wrote {len(trace)} {cfg.scenario} demands to {out}")
    return 0


def cmd_run(opts: Options) -> int:
    topo = resolve_topology(opts.get("topo"))
    configs = algorithm_configs(opts)
    out = opts.get("out")
    if not out:
        raise CliError("run needs --out DIR")
    trace, echo = load_or_generate(opts, topo)
    marks = parse_checkpoints(opts.get("checkpoints"), len(trace))
    window, stride = int(opts.get("window")), int(opts.get("stride"))
    if window < 1 or stride < 1:
        raise CliError("window and stride must be positive")
    cmp = compare_algorithms(
        topo,
        trace,
        configs,
        jobs=int(opts.get("jobs")),
        window=window,
        stride=stride,
        seed=echo.get("seed"),
    )
    out_dir = Path(out)
    outputs = Outputs()
    for name, res in cmp.results.items():
        summary = res.summary(marks)
        summary["workload"] = echo
        summary["topology"] = topo.name
        if name == "RRATE":
            summary["learning_mean_duration_ms"] = res.stage_duration_ms("learning")
            summary["post_learning_mean_duration_ms"] = res.stage_duration_ms("post-learning")
            summary["cost_evaluations"] = res.cost_evaluations
        outputs.add(out_dir / f"{name}.csv", demand_csv(res))
        outputs.add(out_dir / f"{name}.summary.json", dump_json(summary))
    if len(cmp.results) > 1:
        rows = cmp.table(marks)
        outputs.add(out_dir / "comparison.csv", _csv_text(rows[0], rows[1:]))
    outputs.commit()

    for name, res in cmp.results.items():
        print(f"{name}: acceptance {res.acceptance_pct:.2f}% ({res.accepted}/{res.total}), "
              f"mean duration {res.mean_duration_ms:.3f} ms")
    if len(cmp.results) > 1 and marks:
        print(cmp.format(marks))
    return 0


def cmd_sweep(opts: Options) -> int:
    topo = resolve_topology(opts.get("topo"))
    out = opts.get("out")
    if not out:
        raise CliError("sweep needs --out FILE")
    try:
        grid = simplex_grid(opts.get("step"))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad --step: {exc}") from exc
    trace, _ = load_or_generate(opts, topo)
    rows = sweep_teard(topo, trace, grid, jobs=int(opts.get("jobs")))
    n = len(rows)
    table = []
    for i, r in enumerate(rows):
        flag = "top3" if i < 3 else "bottom3" if i >= n - 3 else ""
        if r.empty:
            flag = (flag + " empty").strip()
        table.append([i + 1, fmt_fraction(r.k1), fmt_fraction(r.k2), fmt_fraction(r.k3),
                      f"{r.acceptance_pct:.2f}", flag])
    outputs = Outputs()
    outputs.add(Path(out), _csv_text(SWEEP_HEADER, table))
    outputs.commit()
    if rows:
        spread = rows[0].acceptance_pct - rows[-1].acceptance_pct
        print(f"{n} triples; best {rows[0].acceptance_pct:.2f}%, worst {rows[-1].acceptance_pct:.2f}%, "
              f"spread {spread:.2f} points")
    else:
        print("0 triples: no grid point has all three parts strictly inside (0, 1)")
    return 0


# --- parser -----------------------------------------------------------------


def _add_topo(p):
    p.add_argument("--topo", help="topology JSON file or shipped name (mira, cesnet, ansnet)")
    p.add_argument("--config", help="JSON file with option defaults")


def _add_workload(p, trace=True):
    p.add_argument("--scenario", choices=["static", "dynamic"])
    p.add_argument("--count", type=int, help="number of demands (default 1000 static, 2000 dynamic)")
    p.add_argument("--seed", type=int, help=f"workload seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--rate", type=float, help="dynamic arrival rate per time unit")
    p.add_argument("--holding", type=float, help="dynamic mean holding time")
    if trace:
        p.add_argument("--trace", help="replay this trace CSV instead of generating demands")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bwroute", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a topology and report per-pair path counts")
    _add_topo(p)
    p.add_argument("--slack", type=int, help=f"extra hops over the shortest path (default {DEFAULT_SLACK})")
    p.add_argument("--path-cap", type=int, help=f"per-pair path limit (default {DEFAULT_PATH_CAP})")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen-trace", help="write a seeded demand trace")
    _add_topo(p)
    _add_workload(p, trace=False)
    p.add_argument("--out", help="trace CSV to write")
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("run", help="simulate one or more algorithms on one trace")
    _add_topo(p)
    _add_workload(p)
    p.add_argument("--algo", help="MHA, MIRA, RRATE, BGMRA, TEARD, a comma list, or ALL")
    p.add_argument("--k1", help="TEARD moderation parameter (e.g. 0.3 or 3/10)")
    p.add_argument("--k2")
    p.add_argument("--k3")
    p.add_argument("--out", help="output directory")
    p.add_argument("--window", type=int, help=f"windowed acceptance size (default {DEFAULT_WINDOW})")
    p.add_argument("--stride", type=int, help="demands between windowed samples (default 1)")
    p.add_argument("--checkpoints", help="comma list of demand counts for the report (default every 100)")
    p.add_argument("--jobs", type=int, help="parallel runs (default 1)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="TEARD moderation-parameter sweep")
    _add_topo(p)
    _add_workload(p)
    p.add_argument("--step", help="grid spacing that divides 1 (default 0.1)")
    p.add_argument("--out", help="sweep CSV to write")
    p.add_argument("--jobs", type=int, help="parallel runs (default 1)")
    p.set_defaults(func=cmd_sweep)
    return parser


EXPECTED = (CliError, TopologyError, CatalogError, WorkloadError, ConfigError, SetupError, OSError, ValueError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(Options(args))
    except EXPECTED as exc:
        print(f"bwroute: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
