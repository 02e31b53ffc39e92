"""Event-driven simulation of demand admission, plus comparison and sweep runs."""

from __future__ import annotations

import heapq
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algorithms import ALGORITHMS, AlgorithmConfig, Router, TeardParams, as_fraction
from .history import RoutingHistory
from .network import Demand, Topology
from .paths import CriticalityTable, build_criticality_table

DEFAULT_WINDOW = 300
DEPARTURE, ARRIVAL = 0, 1


class SetupError(ValueError):
    """The trace does not fit the topology."""


@dataclass(frozen=True)
class DemandRecord:
    demand_id: int
    accepted: bool
    path_nodes: tuple[int, ...]
    weight: float | None
    duration_ns: int
    stage: str | None = None


@dataclass
class SimResult:
    algorithm: str
    records: list[DemandRecord]
    window: int = DEFAULT_WINDOW
    stride: int = 1
    config: dict = field(default_factory=dict)
    seed: int | None = None
    topology_hash: str = ""
    cost_evaluations: int = 0

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def accepted(self) -> int:
        return sum(r.accepted for r in self.records)

    @property
    def rejected(self) -> int:
        return self.total - self.accepted

    @property
    def empty(self) -> bool:
        return not self.records

    @property
    def acceptance(self) -> Fraction:
        """Accepted share as an exact fraction; vacuously 1 for an empty run."""
        if not self.records:
            return Fraction(1)
        return Fraction(self.accepted, self.total)

    @property
    def acceptance_pct(self) -> float:
        return float(self.acceptance * 100)

    @property
    def mean_duration_ms(self) -> float:
        return self.mean_duration_ms_over(self.records)

    @staticmethod
    def mean_duration_ms_over(records: Sequence[DemandRecord]) -> float:
        if not records:
            return 0.0
        return sum(r.duration_ns for r in records) / len(records) / 1e6

    def stage_duration_ms(self, stage: str) -> float:
        return self.mean_duration_ms_over([r for r in self.records if r.stage == stage])

    def checkpoint(self, n: int) -> tuple[float, float]:
        """Acceptance % and mean duration (ms) over the first ``n`` demands."""
        head = self.records[:n]
        if not head:
            return 100.0, 0.0
        return 100.0 * sum(r.accepted for r in head) / len(head), self.mean_duration_ms_over(head)

    def windowed(self, window: int | None = None, stride: int | None = None) -> list[float]:
        """Sliding-window acceptance %, one value per ``stride`` demands.

        Entry ``j`` covers the (at most) ``window`` demands ending at demand
        ``min((j + 1) * stride, total)``; the series has ``ceil(total / stride)``
        entries.
        """
        window = window or self.window
        stride = stride or self.stride
        flags = [1 if r.accepted else 0 for r in self.records]
        prefix = [0]
        for f in flags:
            prefix.append(prefix[-1] + f)
        out = []
        for j in range(math.ceil(len(flags) / stride)):
            end = min((j + 1) * stride, len(flags))
            start = max(0, end - window)
            out.append(100.0 * (prefix[end] - prefix[start]) / (end - start))
        return out

    def summary(self, checkpoints: Iterable[int] = ()) -> dict:
        return {
            "algorithm": self.algorithm,
            "config": self.config,
            "seed": self.seed,
            "topology_hash": self.topology_hash,
            "demands": self.total,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "empty": self.empty,
            "acceptance_pct": self.acceptance_pct,
            "mean_duration_ms": self.mean_duration_ms,
            "window": self.window,
            "stride": self.stride,
            "windowed_acceptance_pct": self.windowed(),
            "checkpoints": [
                {"demands": n, "acceptance_pct": a, "mean_duration_ms": t}
                for n in checkpoints
                for a, t in [self.checkpoint(n)]
            ],
            "environment": {"python": platform.python_version(), "machine": platform.machine()},
        }


def _validate_trace(topology: Topology, trace: Sequence[Demand]) -> None:
    pairs = set(topology.pair_keys)
    for d in trace:
        if d.pair not in pairs:
            raise SetupError(f"demand {d.id}: pair {d.pair} is not a declared ie pair")


def default_table(topology: Topology) -> CriticalityTable:
    return build_criticality_table(topology.graph, topology.pair_keys)


def run_simulation(
    topology: Topology,
    config: AlgorithmConfig,
    trace: Sequence[Demand],
    seed: int | None = None,
    table: CriticalityTable | None = None,
    window: int = DEFAULT_WINDOW,
    stride: int = 1,
    count_rejected: bool = True,
    crit3_active_only: bool = False,
    check: bool = False,
    observer=None,
) -> SimResult:
    """Run ``trace`` through ``config`` on a private copy of the topology graph.

    Departures are processed before arrivals at equal timestamps. Only the
    online phase (weighting, pruning, path search) is timed. ``observer``, if
    given, is called as ``observer(kind, demand, graph)`` after every event.
    """
    _validate_trace(topology, trace)
    graph = topology.graph.copy()
    graph.reset()
    pairs = topology.pair_keys
    if table is None and config.name in ("TEARD", "BGMRA"):
        table = default_table(topology)
    router = Router(config, graph, pairs, table)
    history = RoutingHistory(pairs, graph.n_links, active_only=crit3_active_only)

    events: list = []
    seq = 0
    for d in trace:
        heapq.heappush(events, (d.arrival_time, ARRIVAL, seq, d, None))
        seq += 1

    records: dict[int, DemandRecord] = {}
    order = []
    clock = time.perf_counter_ns
    while events:
        t, kind, _, demand, path = heapq.heappop(events)
        if kind == DEPARTURE:
            graph.release(path, demand.bandwidth)
            history.record_released(path)
        else:
            history.record_request(demand.pair)
            t0 = clock()
            sel = router.select(graph, demand, history)
            elapsed = clock() - t0
            if sel.accepted:
                graph.reserve(sel.path, demand.bandwidth)
                history.record_established(sel.path)
                if math.isfinite(demand.holding_time):
                    heapq.heappush(events, (t + demand.holding_time, DEPARTURE, seq, demand, sel.path))
                    seq += 1
            elif not count_rejected:
                history.forget_request(demand.pair)
            records[demand.id] = DemandRecord(
                demand.id,
                sel.accepted,
                tuple(graph.path_nodes(sel.path)) if sel.accepted else (),
                sel.weight,
                elapsed,
                sel.stage,
            )
            order.append(demand.id)
        if check:
            graph.check_invariants()
            history.check_invariants()
        if observer is not None:
            observer("departure" if kind == DEPARTURE else "arrival", demand, graph)

    return SimResult(
        algorithm=config.name,
        records=[records[i] for i in order],
        window=window,
        stride=stride,
        config=config.to_dict(),
        seed=seed,
        topology_hash=topology.digest(),
        cost_evaluations=router.rrate.cost_evaluations if router.rrate else 0,
    )


@dataclass
class Comparison:
    results: dict[str, SimResult]

    def table(self, checkpoints: Sequence[int]) -> list[list[str]]:
        """Rows of ``acceptance - duration`` cells, one row per checkpoint."""
        names = list(self.results)
        rows = [["NoD", *names]]
        for n in checkpoints:
            cells = []
            for name in names:
                pct, ms = self.results[name].checkpoint(n)
                cells.append(f"{pct:.2f} - {ms:.2f}")
            rows.append([str(n), *cells])
        return rows

    def format(self, checkpoints: Sequence[int]) -> str:
        rows = self.table(checkpoints)
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)


def _run_one(job):
    topology, config, trace, table, kwargs = job
    return run_simulation(topology, config, trace, table=table, **kwargs)


def _run_all(jobs_list: list, jobs: int) -> list[SimResult]:
    # independent runs on private graph copies; results come back in submission order
    if jobs <= 1 or len(jobs_list) <= 1:
        return [_run_one(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=min(jobs, len(jobs_list))) as pool:
        return list(pool.map(_run_one, jobs_list))


def compare_algorithms(
    topology: Topology,
    trace: Sequence[Demand],
    configs: Sequence[AlgorithmConfig | str] = ALGORITHMS,
    table: CriticalityTable | None = None,
    jobs: int = 1,
    **kwargs,
) -> Comparison:
    configs = [AlgorithmConfig(c) if isinstance(c, str) else c for c in configs]
    if table is None and any(c.name in ("TEARD", "BGMRA") for c in configs):
        table = default_table(topology)
    results = _run_all([(topology, c, trace, table, kwargs) for c in configs], jobs)
    return Comparison({c.name: r for c, r in zip(configs, results)})


def simplex_grid(step) -> list[TeardParams]:
    """All (k1, k2, k3) on a grid of spacing ``step`` with every part in (0, 1).

    ``step`` must divide 1 exactly (for example ``0.1``, ``"1/3"``, ``0.25``).
    """
    step = Fraction(str(step)) if isinstance(step, float) else Fraction(step)
    if step <= 0 or (1 / step).denominator != 1:
        raise ValueError(f"grid step {step} does not divide 1")
    n = int(1 / step)
    return [
        TeardParams(i * step, j * step, (n - i - j) * step)
        for i in range(1, n)
        for j in range(1, n - i)
    ]


@dataclass(frozen=True)
class SweepRow:
    k1: Fraction
    k2: Fraction
    k3: Fraction
    acceptance_pct: float
    empty: bool = False


def sweep_teard(
    topology: Topology,
    trace: Sequence[Demand],
    triples: Iterable[TeardParams | tuple],
    table: CriticalityTable | None = None,
    jobs: int = 1,
    **kwargs,
) -> list[SweepRow]:
    """One TEARD run per moderation triple; rows sorted by acceptance, best first."""
    params = [t if isinstance(t, TeardParams) else TeardParams(*t) for t in triples]
    if table is None:
        table = default_table(topology)
    results = _run_all([(topology, AlgorithmConfig("TEARD", teard=p), trace, table, kwargs) for p in params], jobs)
    rows = []
    for p, res in zip(params, results):
        k1, k2, k3 = (as_fraction(k) for k in (p.k1, p.k2, p.k3))
        rows.append(SweepRow(k1, k2, k3, res.acceptance_pct, res.empty))
    # stable sort keeps grid order among ties
    rows.sort(key=lambda r: -r.acceptance_pct)
    return rows
