"""Path enumeration, k-shortest preselection and offline criticality tables.

Ties between paths are always broken by comparing node sequences
lexicographically, so every routine here is deterministic.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Iterable, Sequence

import numpy as np

from .network import NetworkGraph, document_digest

DEFAULT_SLACK = 4
DEFAULT_PATH_CAP = 10_000


class CatalogError(ValueError):
    """Raised when a criticality table cannot be built for the given pairs."""


def shortest_path(
    graph: NetworkGraph,
    source: int,
    target: int,
    weights: Sequence[float] | None = None,
    active: Sequence[bool] | None = None,
    banned_nodes: Iterable[int] = (),
    banned_links: Iterable[int] = (),
):
    """Least-weight simple path, ties broken by the smallest node sequence.

    ``weights`` defaults to unit (hop count). ``active`` masks links out by id.
    Returns ``(total_weight, link_ids)`` or ``None`` when ``target`` is
    unreachable. Weights must be non-negative.

    Labels are ``(distance, node sequence)`` pairs; since two simple paths
    ending at the same node can never be prefixes of one another, the
    lexicographic order of prefixes carries over to their extensions and the
    usual Dijkstra argument applies to the combined key.
    """
    if source == target:
        return (0, [])
    banned_n = set(banned_nodes)
    if source in banned_n or target in banned_n:
        return None
    banned_l = set(banned_links)
    dst, out_links = graph.dst, graph.out_links

    best: dict[int, tuple] = {source: (0, (source,))}
    via: dict[int, list[int]] = {source: []}
    done = set()
    heap = [(0, (source,), source)]
    while heap:
        dist, seq, u = heapq.heappop(heap)
        if u in done:
            continue
        if best[u] != (dist, seq):
            continue
        done.add(u)
        if u == target:
            return (dist, via[u])
        for lid in out_links[u]:
            if active is not None and not active[lid]:
                continue
            if lid in banned_l:
                continue
            v = dst[lid]
            if v in done or v in banned_n:
                continue
            nd = dist + (1 if weights is None else weights[lid])
            label = (nd, seq + (v,))
            cur = best.get(v)
            if cur is None or label < cur:
                best[v] = label
                via[v] = via[u] + [lid]
                heapq.heappush(heap, (nd, label[1], v))
    return None


def hop_distances_to(graph: NetworkGraph, target: int) -> list[float]:
    dist = [float("inf")] * graph.n_nodes
    dist[target] = 0
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for lid in graph.in_links[v]:
            u = graph.src[lid]
            if dist[u] == float("inf"):
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def enumerate_paths(
    graph: NetworkGraph,
    pair: tuple[int, int],
    hop_limit: int,
    cap: int | None = None,
) -> list[list[int]]:
    """All simple paths of at most ``hop_limit`` links, sorted by (hops, nodes).

    If ``cap`` is given and more than ``cap`` paths exist, :class:`CatalogError`
    is raised instead of returning a truncated set.
    """
    s, t = pair
    to_t = hop_distances_to(graph, t)
    if to_t[s] > hop_limit:
        return []
    found: list[tuple[int, tuple[int, ...], list[int]]] = []
    on_path = [False] * graph.n_nodes
    on_path[s] = True
    nodes = [s]
    links: list[int] = []
    dst = graph.dst
    # iterative DFS; each frame is an iterator over the outgoing links of a node
    stack = [iter(graph.out_links[s])]
    while stack:
        advanced = False
        for lid in stack[-1]:
            v = dst[lid]
            if on_path[v] or len(links) + 1 + to_t[v] > hop_limit:
                continue
            if v == t:
                found.append((len(links) + 1, tuple(nodes) + (t,), links + [lid]))
                if cap is not None and len(found) > cap:
                    raise CatalogError(
                        f"pair {pair}: more than {cap} paths within {hop_limit} hops; "
                        "lower the hop slack"
                    )
                continue
            on_path[v] = True
            nodes.append(v)
            links.append(lid)
            stack.append(iter(graph.out_links[v]))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if links:
                links.pop()
                on_path[nodes.pop()] = False
    found.sort(key=lambda item: (item[0], item[1]))
    return [p for _, _, p in found]


def k_shortest_paths(graph: NetworkGraph, pair: tuple[int, int], k: int) -> list[list[int]]:
    """Up to ``k`` loopless paths by ascending hop count (Yen's algorithm).

    Spur paths are found with the same (hops, node sequence) key used for the
    final order, which keeps ties deterministic and makes the result equal to
    the first ``k`` entries of the fully sorted enumeration.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    s, t = pair
    first = shortest_path(graph, s, t)
    if first is None:
        return []
    accepted = [first[1]]
    accepted_nodes = [tuple(graph.path_nodes(first[1]))]
    candidates: list[tuple[int, tuple[int, ...], list[int]]] = []
    queued = {accepted_nodes[0]}
    while len(accepted) < k:
        last_links = accepted[-1]
        last_nodes = accepted_nodes[-1]
        for i in range(len(last_links)):
            spur = last_nodes[i]
            root_nodes = last_nodes[: i + 1]
            root_links = last_links[:i]
            banned_links = {
                links[i]
                for links, nodes in zip(accepted, accepted_nodes)
                if len(links) > i and nodes[: i + 1] == root_nodes
            }
            found = shortest_path(
                graph, spur, t, banned_nodes=root_nodes[:-1], banned_links=banned_links
            )
            if found is None:
                continue
            total = root_links + found[1]
            nodes = tuple(graph.path_nodes(total))
            if nodes in queued:
                continue
            queued.add(nodes)
            heapq.heappush(candidates, (len(total), nodes, total))
        if not candidates:
            break
        _, nodes, links = heapq.heappop(candidates)
        accepted.append(links)
        accepted_nodes.append(nodes)
    return accepted


@dataclass
class CriticalityTable:
    """Per-pair link occurrence counts over enumerated paths.

    ``counts[p][l]`` is the number of enumerated paths of pair ``p`` that use
    link ``l``; ``path_counts[p]`` is the number of enumerated paths. The
    float matrix ``rates`` holds ``counts / path_counts`` row by row.
    """

    pairs: list[tuple[int, int]]
    n_links: int
    path_counts: list[int]
    counts: list[list[int]]
    hop_limits: list[int]
    slack: int | None = None
    rates: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.rates = np.array(
            [[c / total for c in row] for row, total in zip(self.counts, self.path_counts)],
            dtype=float,
        ).reshape(len(self.pairs), self.n_links)
        self._index = {p: i for i, p in enumerate(self.pairs)}

    def index(self, pair: tuple[int, int]) -> int:
        return self._index[tuple(pair)]

    def crit(self, pair: tuple[int, int], link: int) -> float:
        return float(self.rates[self.index(pair), link])

    def crit_fraction(self, pair: tuple[int, int], link: int) -> Fraction:
        i = self.index(pair)
        return Fraction(self.counts[i][link], self.path_counts[i])

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "n_links": self.n_links,
            "path_counts": self.path_counts,
            "counts": self.counts,
            "hop_limits": self.hop_limits,
            "slack": self.slack,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CriticalityTable":
        return cls(
            pairs=[tuple(p) for p in data["pairs"]],
            n_links=data["n_links"],
            path_counts=list(data["path_counts"]),
            counts=[list(r) for r in data["counts"]],
            hop_limits=list(data["hop_limits"]),
            slack=data.get("slack"),
        )


def _hop_limit_for(graph, pair, hop_limit, slack):
    if hop_limit is not None:
        return hop_limit
    d = hop_distances_to(graph, pair[1])[pair[0]]
    if d == float("inf"):
        raise CatalogError(f"ie pair {pair} is disconnected")
    return int(d) + slack


def build_criticality_table(
    graph: NetworkGraph,
    pairs: Iterable[tuple[int, int]],
    hop_limit: int | None = None,
    slack: int = DEFAULT_SLACK,
    path_cap: int = DEFAULT_PATH_CAP,
) -> CriticalityTable:
    """Offline phase: link occurrence rates over each pair's enumerated paths.

    With ``hop_limit=None`` each pair is enumerated up to its own shortest hop
    distance plus ``slack``. Only the topology is read; residuals are ignored.
    """
    pairs = [tuple(p) for p in pairs]
    path_counts, counts, limits = [], [], []
    for pair in pairs:
        limit = _hop_limit_for(graph, pair, hop_limit, slack)
        paths = enumerate_paths(graph, pair, limit, cap=path_cap)
        if not paths:
            raise CatalogError(f"ie pair {pair} has no path within {limit} hops")
        row = [0] * graph.n_links
        for path in paths:
            for lid in path:
                row[lid] += 1
        path_counts.append(len(paths))
        counts.append(row)
        limits.append(limit)
    return CriticalityTable(
        pairs, graph.n_links, path_counts, counts, limits, None if hop_limit is not None else slack
    )


def bgmra_criticality(
    graph: NetworkGraph,
    pairs: Iterable[tuple[int, int]] | None = None,
    hop_limit: int | None = None,
    slack: int = DEFAULT_SLACK,
    table: CriticalityTable | None = None,
) -> np.ndarray:
    """Per-link sum of occurrence rates over all pairs."""
    if table is None:
        table = build_criticality_table(graph, pairs, hop_limit=hop_limit, slack=slack)
    total = np.zeros(table.n_links)
    for row in table.rates:
        total += row
    return total


def table_cache_key(topology_doc: dict, pairs, hop_limit, slack) -> str:
    return document_digest(
        {
            "topology": topology_doc,
            "pairs": [list(p) for p in pairs],
            "hop_limit": hop_limit,
            "slack": slack,
        }
    )


def cached_criticality_table(
    graph: NetworkGraph,
    topology_doc: dict,
    pairs,
    cache_dir: str | FsPath,
    hop_limit: int | None = None,
    slack: int = DEFAULT_SLACK,
    path_cap: int = DEFAULT_PATH_CAP,
) -> CriticalityTable:
    """Build a table, or reload it from ``cache_dir`` when the inputs match."""
    pairs = [tuple(p) for p in pairs]
    key = table_cache_key(topology_doc, pairs, hop_limit, slack)
    path = FsPath(cache_dir) / f"crit-{key[:16]}.json"
    if path.exists():
        data = json.loads(path.read_text())
        if data.get("key") == key:
            return CriticalityTable.from_dict(data["table"])
    table = build_criticality_table(graph, pairs, hop_limit=hop_limit, slack=slack, path_cap=path_cap)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"key": key, "table": table.to_dict()}))
    tmp.replace(path)
    return table
