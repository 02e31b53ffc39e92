"""Seeded demand traces for static and dynamic scenarios.

Random numbers come from numpy's Philox counter-based generator. Per demand
the draws are taken in a fixed order: pair, bandwidth, then (dynamic only)
inter-arrival time and holding time. Each draw is one uniform double on
[0, 1); pairs and bandwidths are picked by inverse CDF and the exponential
times by inverse transform, so a trace depends only on the seed and config.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from .network import Demand, IePair

STATIC = "static"
DYNAMIC = "dynamic"
TRACE_HEADER = ["id", "arrival_time", "ingress", "egress", "bandwidth", "holding_time"]
TIME_DIGITS = 9


class WorkloadError(ValueError):
    pass


class TraceParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class WorkloadConfig:
    scenario: str = STATIC
    count: int | None = None
    arrival_rate: float = 40.0
    mean_holding: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in (STATIC, DYNAMIC):
            raise WorkloadError(f"scenario must be 'static' or 'dynamic', got {self.scenario!r}")
        if self.count is not None and self.count < 0:
            raise WorkloadError("demand count must be non-negative")
        if self.scenario == DYNAMIC and (self.arrival_rate <= 0 or self.mean_holding <= 0):
            raise WorkloadError("dynamic scenario needs positive arrival rate and mean holding time")

    @property
    def n_demands(self) -> int:
        if self.count is not None:
            return self.count
        return 1000 if self.scenario == STATIC else 2000


def _round_time(t: float) -> float:
    return round(t, TIME_DIGITS)


def gen_demands(config: WorkloadConfig, pairs: Sequence[IePair], menu: Sequence[int]) -> list[Demand]:
    """Draw ``config.n_demands`` demands over ``pairs`` with sizes from ``menu``."""
    if not menu:
        raise WorkloadError("bandwidth menu is empty")
    if any(b <= 0 for b in menu):
        raise WorkloadError("bandwidth menu entries must be positive")
    weights = [p.request_weight for p in pairs]
    total = float(sum(weights))
    if not pairs or total <= 0:
        raise WorkloadError("ie request weights sum to zero")
    cdf = list(np.cumsum(weights) / total)
    cdf[-1] = 1.0

    rng = np.random.Generator(np.random.Philox(config.seed))
    dynamic = config.scenario == DYNAMIC
    demands = []
    clock = 0.0
    last_arrival = -math.inf
    for idx in range(config.n_demands):
        u_pair = rng.random()
        pair = pairs[min(bisect.bisect_right(cdf, u_pair), len(pairs) - 1)]
        u_bw = rng.random()
        bandwidth = menu[min(int(u_bw * len(menu)), len(menu) - 1)]
        if dynamic:
            clock += -math.log1p(-rng.random()) / config.arrival_rate
            holding = _round_time(-math.log1p(-rng.random()) * config.mean_holding)
            arrival = _round_time(clock)
            if arrival <= last_arrival:
                arrival = _round_time(last_arrival + 10.0**-TIME_DIGITS)
            # a holding time that rounds to zero still has to hold for one tick
            holding = max(holding, 10.0**-TIME_DIGITS)
        else:
            arrival, holding = float(idx), math.inf
        last_arrival = arrival
        demands.append(Demand(idx, pair.ingress, pair.egress, int(bandwidth), arrival, holding))
    return demands


def _fmt_time(t: float) -> str:
    return "inf" if math.isinf(t) else f"{t:.{TIME_DIGITS}f}"


def dump_trace(trace: Sequence[Demand]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for d in trace:
        w.writerow([d.id, _fmt_time(d.arrival_time), d.ingress, d.egress, d.bandwidth, _fmt_time(d.holding_time)])
    return buf.getvalue()


def parse_trace(text: str) -> list[Demand]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header != TRACE_HEADER:
        raise TraceParseError(1, f"expected header {','.join(TRACE_HEADER)}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(TRACE_HEADER):
            raise TraceParseError(lineno, f"expected {len(TRACE_HEADER)} fields, got {len(row)}")
        try:
            did, ingress, egress, bandwidth = int(row[0]), int(row[2]), int(row[3]), int(row[4])
            arrival, holding = float(row[1]), float(row[5])
        except ValueError as exc:
            raise TraceParseError(lineno, str(exc)) from None
        if bandwidth <= 0:
            raise TraceParseError(lineno, f"bandwidth must be positive, got {bandwidth}")
        if not holding > 0:
            raise TraceParseError(lineno, f"holding time must be positive, got {row[5]}")
        if not math.isfinite(arrival):
            raise TraceParseError(lineno, "arrival time must be finite")
        out.append(Demand(did, ingress, egress, bandwidth, arrival, holding))
    return out


def save_trace(trace: Sequence[Demand], path: str | FsPath) -> None:
    path = FsPath(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dump_trace(trace))
    tmp.replace(path)


def load_trace(path: str | FsPath) -> list[Demand]:
    return parse_trace(FsPath(path).read_text())
