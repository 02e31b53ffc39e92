"""Link weighting and route selection for MHA, MIRA, RRATE, BGMRA and TEARD.

Every strategy follows the same online recipe: prune links that cannot carry
the demand, weight the survivors, then take the least-weight path. RRATE is
the exception; it races a fixed set of preselected candidate paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .history import RoutingHistory
from .maxflow import critical_links
from .network import Demand, NetworkGraph
from .paths import CriticalityTable, bgmra_criticality, k_shortest_paths, shortest_path

ALGORITHMS = ("MHA", "MIRA", "RRATE", "BGMRA", "TEARD")


class ConfigError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # shortest repr, so 0.3 means 3/10 rather than its binary expansion
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class TeardParams:
    k1: Fraction | float = 0.3
    k2: Fraction | float = 0.4
    k3: Fraction | float = 0.3

    def __post_init__(self):
        ks = [as_fraction(k) for k in (self.k1, self.k2, self.k3)]
        if not all(0 < k < 1 for k in ks):
            raise ConfigError(f"TEARD moderation parameters must lie in (0, 1), got {ks}")
        if sum(ks) != 1:
            raise ConfigError(f"TEARD moderation parameters must sum to 1, got {sum(ks)}")

    @property
    def floats(self) -> tuple[float, float, float]:
        return float(self.k1), float(self.k2), float(self.k3)


@dataclass(frozen=True)
class RrateParams:
    k: int = 30
    N: int = 15
    k1: float = 0.5
    k2: float = 0.5
    residual: str = "max"

    def __post_init__(self):
        if self.k < 1 or self.N < 1:
            raise ConfigError("RRATE needs k >= 1 and N >= 1")
        if self.k1 < 0 or self.k2 < 0:
            raise ConfigError("RRATE moderation parameters must be non-negative")
        if self.residual not in ("max", "min"):
            raise ConfigError("RRATE residual mode must be 'max' or 'min'")


@dataclass(frozen=True)
class MiraParams:
    alpha: Mapping[tuple[int, int], float] | None = None
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError("MIRA epsilon must be non-negative")


@dataclass(frozen=True)
class AlgorithmConfig:
    name: str
    teard: TeardParams = field(default_factory=TeardParams)
    rrate: RrateParams = field(default_factory=RrateParams)
    mira: MiraParams = field(default_factory=MiraParams)

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.name!r}; expected one of {ALGORITHMS}")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AlgorithmConfig":
        name = str(doc.get("algorithm", "TEARD")).upper()
        teard = TeardParams(**doc.get("teard", {}))
        rrate = RrateParams(**doc.get("rrate", {}))
        mira_doc = dict(doc.get("mira", {}))
        alpha = mira_doc.pop("alpha", None)
        if alpha:
            # JSON keys are strings such as "0,12"
            alpha = {tuple(int(x) for x in str(k).split(",")): float(v) for k, v in alpha.items()}
        mira = MiraParams(alpha=alpha or None, **mira_doc)
        return cls(name, teard, rrate, mira)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.name,
            "teard": {"k1": str(self.teard.k1), "k2": str(self.teard.k2), "k3": str(self.teard.k3)},
            "rrate": {
                "k": self.rrate.k,
                "N": self.rrate.N,
                "k1": self.rrate.k1,
                "k2": self.rrate.k2,
                "residual": self.rrate.residual,
            },
            "mira": {
                "alpha": None
                if self.mira.alpha is None
                else {f"{i},{e}": a for (i, e), a in sorted(self.mira.alpha.items())},
                "epsilon": self.mira.epsilon,
            },
        }


# --- weights -----------------------------------------------------------------


def weights_mha(graph: NetworkGraph) -> list[float]:
    return [1.0] * graph.n_links


def weights_mira(
    graph: NetworkGraph,
    pairs: Sequence[tuple[int, int]],
    demand_pair: tuple[int, int],
    alpha: Mapping[tuple[int, int], float] | None = None,
    epsilon: float = 1e-6,
) -> list[float]:
    """Sum of pair importances over the other pairs for which a link is critical.

    ``epsilon`` is added to every link so that, among interference-free routes,
    fewer hops win.
    """
    w = [0.0] * graph.n_links
    own = tuple(demand_pair)
    for pair in pairs:
        pair = tuple(pair)
        if pair == own:
            continue
        a = 1.0 if alpha is None else alpha.get(pair, 1.0)
        for lid in critical_links(graph, *pair):
            w[lid] += a
    return [x + epsilon for x in w]


def critical_counts(graph: NetworkGraph, pairs: Sequence[tuple[int, int]]) -> list[int]:
    """Number of pairs for which each link is min-cut critical."""
    counts = [0] * graph.n_links
    for pair in pairs:
        for lid in critical_links(graph, *pair):
            counts[lid] += 1
    return counts


def rrate_cost(
    path: Sequence[int],
    crit_counts: Sequence[int],
    graph: NetworkGraph,
    bandwidth: int,
    k1: float,
    k2: float,
    residual: str = "max",
) -> float:
    """``k1 * C + k2 / R``; ``inf`` when the path is infeasible or R is zero."""
    res = graph.residual
    if any(res[lid] < bandwidth for lid in path):
        return float("inf")
    c = sum(crit_counts[lid] for lid in path)
    spare = [res[lid] - bandwidth for lid in path]
    r = max(spare) if residual == "max" else min(spare)
    if r <= 0:
        return float("inf")
    return k1 * c + k2 / r


def weights_bgmra(graph: NetworkGraph, scores: Sequence[float], active: Sequence[bool] | None = None) -> list[float]:
    """Criticality over residual bandwidth; ``inf`` on pruned links."""
    res = graph.residual
    out = []
    for lid, score in enumerate(scores):
        if (active is not None and not active[lid]) or res[lid] <= 0:
            out.append(float("inf"))
        else:
            out.append(float(score) / res[lid])
    return out


def teard_crit1(table: CriticalityTable, history: RoutingHistory) -> np.ndarray:
    """Request-probability-weighted occurrence rate, in percent."""
    prob = history.probabilities()
    acc = np.zeros(table.n_links)
    for row, pair in zip(table.rates, table.pairs):
        acc = acc + row * prob[history.index(pair)] * 100
    return acc


def teard_crit2(graph: NetworkGraph) -> np.ndarray:
    """Used over residual bandwidth, in percent; ``inf`` where nothing is left."""
    cap = np.asarray(graph.capacity, dtype=float)
    res = np.asarray(graph.residual, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (cap - res) / res * 100
    out[res <= 0] = np.inf
    return out


def teard_crit3(history: RoutingHistory) -> np.ndarray:
    """Share of established paths through each link, in percent."""
    if history.total_paths == 0:
        return np.zeros(len(history.link_paths))
    return history.link_paths / history.total_paths * 100


def teard_blend(c1, c2, c3, params: TeardParams) -> np.ndarray:
    k1, k2, k3 = params.floats
    return k1 * c1 + k2 * c2 + k3 * c3


def weights_teard(
    graph: NetworkGraph,
    table: CriticalityTable,
    history: RoutingHistory,
    params: TeardParams,
    active: Sequence[bool] | None = None,
) -> np.ndarray:
    w = teard_blend(teard_crit1(table, history), teard_crit2(graph), teard_crit3(history), params)
    if active is not None:
        w[~np.asarray(active, dtype=bool)] = np.inf
    return w


# --- routing -----------------------------------------------------------------


@dataclass
class Selection:
    path: list[int] | None
    weight: float | None = None
    stage: str | None = None

    @property
    def accepted(self) -> bool:
        return self.path is not None


def route(graph: NetworkGraph, weights: Sequence[float], demand: Demand) -> Selection:
    """Least-weight path on the links that can carry the demand."""
    view = graph.prune_infeasible(demand.bandwidth)
    if hasattr(weights, "tolist"):
        weights = weights.tolist()
    found = shortest_path(graph, demand.ingress, demand.egress, weights=weights, active=view.active)
    if found is None:
        return Selection(None)
    return Selection(found[1], float(found[0]))


class RrateState:
    """Per-pair random race over ``k`` preselected candidate paths."""

    LEARNING = "learning"
    POST = "post-learning"

    def __init__(self, graph: NetworkGraph, pairs: Sequence[tuple[int, int]], params: RrateParams):
        self.params = params
        self.pairs = [tuple(p) for p in pairs]
        self.candidates = {p: k_shortest_paths(graph, p, params.k) for p in self.pairs}
        self.rewards = {p: [0] * len(self.candidates[p]) for p in self.pairs}
        self.stage = {p: self.LEARNING for p in self.pairs}
        self.cost_evaluations = 0

    def select(self, graph: NetworkGraph, demand: Demand) -> Selection:
        pair = demand.pair
        cands = self.candidates[pair]
        rewards = self.rewards[pair]
        b = demand.bandwidth
        if self.stage[pair] == self.POST:
            order = sorted(range(len(cands)), key=lambda j: (-rewards[j], j))
            res = graph.residual
            for j in order:
                if all(res[lid] >= b for lid in cands[j]):
                    return Selection(list(cands[j]), None, self.POST)
            return Selection(None, None, self.POST)

        p = self.params
        counts = critical_counts(graph, self.pairs)
        best_j, best_cost = None, float("inf")
        for j, path in enumerate(cands):
            cost = rrate_cost(path, counts, graph, b, p.k1, p.k2, p.residual)
            self.cost_evaluations += 1
            if cost < best_cost:
                best_j, best_cost = j, cost
        if best_j is None:
            return Selection(None, None, self.LEARNING)
        rewards[best_j] += 1
        if rewards[best_j] >= p.N:
            self.stage[pair] = self.POST
        return Selection(list(cands[best_j]), best_cost, self.LEARNING)


class Router:
    """Binds an algorithm configuration to a topology for one simulation run."""

    def __init__(
        self,
        config: AlgorithmConfig,
        graph: NetworkGraph,
        pairs: Sequence[tuple[int, int]],
        table: CriticalityTable | None = None,
    ):
        self.config = config
        self.pairs = [tuple(p) for p in pairs]
        self.table = table
        self.bgmra_scores = None
        self.rrate = None
        if config.name in ("TEARD", "BGMRA") and table is None:
            raise ConfigError(f"{config.name} needs a criticality table")
        if config.name == "BGMRA":
            self.bgmra_scores = bgmra_criticality(graph, table=table)
        if config.name == "RRATE":
            self.rrate = RrateState(graph, self.pairs, config.rrate)

    def select(self, graph: NetworkGraph, demand: Demand, history: RoutingHistory) -> Selection:
        name = self.config.name
        if name == "RRATE":
            return self.rrate.select(graph, demand)
        if name == "MHA":
            return route(graph, weights_mha(graph), demand)
        if name == "MIRA":
            m = self.config.mira
            w = weights_mira(graph, self.pairs, demand.pair, m.alpha, m.epsilon)
            return route(graph, w, demand)
        active = graph.prune_infeasible(demand.bandwidth).active
        if name == "BGMRA":
            w = weights_bgmra(graph, self.bgmra_scores, active)
        else:
            w = weights_teard(graph, self.table, history, self.config.teard, active)
        return route(graph, w, demand)
