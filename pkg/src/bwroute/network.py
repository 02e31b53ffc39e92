"""Network topology with per-link residual bandwidth bookkeeping.

Links are directed. A bidirectional declaration in a topology document
expands into two directed links with independent residual state; the reverse
link of declared link ``i`` gets id ``i + m_declared``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Sequence


class TopologyError(ValueError):
    """Raised when a topology document is malformed or inconsistent."""


class ReservationError(RuntimeError):
    """Raised when a path cannot carry the requested bandwidth."""


class AccountingError(RuntimeError):
    """Residual bookkeeping went out of bounds. Always a caller bug."""


@dataclass(frozen=True)
class Link:
    id: int
    src: int
    dst: int
    capacity: int


@dataclass(frozen=True)
class IePair:
    ingress: int
    egress: int
    request_weight: float = 1.0

    @property
    def key(self) -> tuple[int, int]:
        return (self.ingress, self.egress)


@dataclass(frozen=True)
class Demand:
    id: int
    ingress: int
    egress: int
    bandwidth: int
    arrival_time: float = 0.0
    holding_time: float = float("inf")

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError(f"demand {self.id}: bandwidth must be positive, got {self.bandwidth}")
        if self.holding_time <= 0:
            raise ValueError(f"demand {self.id}: holding time must be positive")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.ingress, self.egress)


class NetworkGraph:
    """Directed graph with capacities and mutable residual bandwidths.

    Link state is kept in flat lists indexed by link id, which keeps the
    inner loops of routing and max-flow free of attribute lookups.
    """

    def __init__(self, n_nodes: int, links: Iterable[Link]):
        links = list(links)
        if n_nodes <= 0:
            raise TopologyError("topology needs at least one node")
        self.n_nodes = n_nodes
        self.links: list[Link] = links
        seen_ends = set()
        for idx, link in enumerate(links):
            if link.id != idx:
                raise TopologyError(f"link ids must be contiguous from 0; got {link.id} at position {idx}")
            for end in (link.src, link.dst):
                if not 0 <= end < n_nodes:
                    raise TopologyError(f"link {link.id} references undeclared node {end}")
            if link.src == link.dst:
                raise TopologyError(f"link {link.id} is a self-loop on node {link.src}")
            if link.capacity <= 0:
                raise TopologyError(f"link {link.id} has non-positive capacity {link.capacity}")
            if (link.src, link.dst) in seen_ends:
                raise TopologyError(f"link {link.id} duplicates directed link {link.src}->{link.dst}")
            seen_ends.add((link.src, link.dst))

        self.src = [l.src for l in links]
        self.dst = [l.dst for l in links]
        self.capacity = [l.capacity for l in links]
        self.residual = list(self.capacity)
        self.out_links: list[list[int]] = [[] for _ in range(n_nodes)]
        self.in_links: list[list[int]] = [[] for _ in range(n_nodes)]
        for link in links:
            self.out_links[link.src].append(link.id)
            self.in_links[link.dst].append(link.id)
        for adj in self.out_links:
            adj.sort(key=lambda lid: self.dst[lid])
        self._by_ends = {(l.src, l.dst): l.id for l in links}

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int, int]]) -> "NetworkGraph":
        """Directed graph from ``(src, dst, capacity)`` triples; ids follow input order."""
        return cls(n_nodes, [Link(i, u, v, c) for i, (u, v, c) in enumerate(edges)])

    @property
    def n_links(self) -> int:
        return len(self.links)

    def link_between(self, u: int, v: int) -> int | None:
        return self._by_ends.get((u, v))

    def copy(self) -> "NetworkGraph":
        g = NetworkGraph.__new__(NetworkGraph)
        g.n_nodes = self.n_nodes
        g.links = self.links
        g.src, g.dst, g.capacity = self.src, self.dst, self.capacity
        g.residual = list(self.residual)
        g.out_links, g.in_links = self.out_links, self.in_links
        g._by_ends = self._by_ends
        return g

    def reset(self) -> None:
        self.residual = list(self.capacity)

    def path_nodes(self, path: Sequence[int]) -> list[int]:
        if not path:
            return []
        return [self.src[path[0]]] + [self.dst[lid] for lid in path]

    def path_from_nodes(self, nodes: Sequence[int]) -> list[int]:
        path = []
        for u, v in zip(nodes, nodes[1:]):
            lid = self._by_ends.get((u, v))
            if lid is None:
                raise KeyError(f"no link {u}->{v}")
            path.append(lid)
        return path

    def is_simple_path(self, path: Sequence[int], ingress: int, egress: int) -> bool:
        if not path:
            return False
        nodes = self.path_nodes(path)
        if nodes[0] != ingress or nodes[-1] != egress:
            return False
        if any(self.dst[a] != self.src[b] for a, b in zip(path, path[1:])):
            return False
        return len(set(nodes)) == len(nodes)

    def reserve(self, path: Sequence[int], bandwidth: int) -> None:
        """Take ``bandwidth`` units on every link of ``path``, all or nothing."""
        res = self.residual
        for lid in path:
            if res[lid] < bandwidth:
                raise ReservationError(
                    f"link {lid} has residual {res[lid]} < requested {bandwidth}"
                )
        for lid in path:
            res[lid] -= bandwidth

    def release(self, path: Sequence[int], bandwidth: int) -> None:
        res, cap = self.residual, self.capacity
        for lid in path:
            if res[lid] + bandwidth > cap[lid]:
                raise AccountingError(
                    f"release of {bandwidth} on link {lid} would exceed capacity "
                    f"({res[lid]} + {bandwidth} > {cap[lid]})"
                )
        for lid in path:
            res[lid] += bandwidth

    def prune_infeasible(self, bandwidth: int) -> "FeasibleView":
        return FeasibleView(self, bandwidth)

    def check_invariants(self) -> None:
        for lid, (r, c) in enumerate(zip(self.residual, self.capacity)):
            if not 0 <= r <= c:
                raise AccountingError(f"link {lid} residual {r} outside [0, {c}]")


class FeasibleView:
    """Links of a graph that can carry ``bandwidth`` at the time of creation.

    The view snapshots the admissible set, so it does not track later
    reservations. Drop it before mutating the graph again.
    """

    __slots__ = ("graph", "bandwidth", "active")

    def __init__(self, graph: NetworkGraph, bandwidth: int):
        if bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        self.graph = graph
        self.bandwidth = bandwidth
        self.active = tuple(r >= bandwidth for r in graph.residual)

    @property
    def link_ids(self) -> list[int]:
        return [lid for lid, ok in enumerate(self.active) if ok]

    def __len__(self) -> int:
        return sum(self.active)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeasibleView):
            return NotImplemented
        return self.graph is other.graph and self.bandwidth == other.bandwidth and self.active == other.active


@dataclass
class Topology:
    """A loaded topology document: graph plus workload parameters."""

    graph: NetworkGraph
    ie_pairs: list[IePair]
    bandwidth_menu: list[int]
    name: str = ""
    document: dict = field(default_factory=dict, repr=False)

    @property
    def pair_keys(self) -> list[tuple[int, int]]:
        return [p.key for p in self.ie_pairs]

    def digest(self) -> str:
        return document_digest(self.document)


def document_digest(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TopologyError(msg)


def _int_field(obj: dict, key: str, where: str) -> int:
    _require(key in obj, f"{where}: missing field '{key}'")
    value = obj[key]
    _require(isinstance(value, int) and not isinstance(value, bool), f"{where}: '{key}' must be an integer, got {value!r}")
    return value


def parse_topology(doc: dict) -> Topology:
    """Build a :class:`Topology` from an already-decoded JSON document."""
    _require(isinstance(doc, dict), "topology document must be a JSON object")
    n = _int_field(doc, "nodes", "topology")
    _require(n > 0, "topology: 'nodes' must be positive")
    raw_links = doc.get("links")
    _require(isinstance(raw_links, list) and raw_links, "topology: 'links' must be a non-empty list")

    m_declared = len(raw_links)
    declared = []
    for pos, entry in enumerate(raw_links):
        _require(isinstance(entry, dict), f"links[{pos}]: must be an object")
        where = f"links[{pos}]"
        lid = _int_field(entry, "id", where) if "id" in entry else pos
        _require(lid == pos, f"{where}: id {lid} must equal its position {pos}")
        u = _int_field(entry, "from", where)
        v = _int_field(entry, "to", where)
        cap = _int_field(entry, "capacity", where)
        for end in (u, v):
            _require(0 <= end < n, f"{where}: references node {end}, topology has nodes 0..{n - 1}")
        _require(cap > 0, f"{where}: non-positive capacity {cap}")
        bidir = entry.get("bidirectional", False)
        _require(isinstance(bidir, bool), f"{where}: 'bidirectional' must be a boolean")
        declared.append((u, v, cap, bidir))

    links = [Link(i, u, v, cap) for i, (u, v, cap, _) in enumerate(declared)]
    # Reverse links get id + m_declared; gaps from one-way links are closed by
    # renumbering only if no bidirectional entries exist past them.
    reverse = {i + m_declared: (v, u, cap) for i, (u, v, cap, bidir) in enumerate(declared) if bidir}
    if reverse:
        _require(
            all(bidir for *_, bidir in declared),
            "topology: mixing one-way and bidirectional links is not supported (reverse ids would not be contiguous)",
        )
        links.extend(Link(i, *reverse[i]) for i in sorted(reverse))
    graph = NetworkGraph(n, links)

    raw_pairs = doc.get("ie_pairs")
    _require(isinstance(raw_pairs, list) and raw_pairs, "topology: 'ie_pairs' must be a non-empty list")
    pairs = []
    for pos, entry in enumerate(raw_pairs):
        where = f"ie_pairs[{pos}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        i = _int_field(entry, "ingress", where)
        e = _int_field(entry, "egress", where)
        for end in (i, e):
            _require(0 <= end < n, f"{where}: references node {end}, topology has nodes 0..{n - 1}")
        _require(i != e, f"{where}: ingress equals egress ({i})")
        w = entry.get("request_weight", 1.0)
        _require(isinstance(w, (int, float)) and not isinstance(w, bool) and w >= 0,
                 f"{where}: request_weight must be a non-negative number")
        pairs.append(IePair(i, e, float(w)))
    keys = [p.key for p in pairs]
    _require(len(set(keys)) == len(keys), "topology: duplicate ie pair")
    _require(sum(p.request_weight for p in pairs) > 0, "topology: ie request weights sum to zero")

    menu = doc.get("bandwidth_menu", [])
    _require(isinstance(menu, list), "topology: 'bandwidth_menu' must be a list")
    for b in menu:
        _require(isinstance(b, int) and not isinstance(b, bool) and b > 0,
                 f"bandwidth_menu: entry {b!r} must be a positive integer")

    return Topology(graph, pairs, list(menu), name=str(doc.get("name", "")), document=doc)


def load_topology(source: str | FsPath | dict) -> Topology:
    """Load a topology from a path, a JSON string, or a decoded document."""
    if isinstance(source, dict):
        return parse_topology(source)
    text = str(source)
    if isinstance(source, FsPath) or not text.lstrip().startswith("{"):
        path = FsPath(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise TopologyError(f"cannot read topology file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"topology is not valid JSON: {exc}") from exc
    return parse_topology(doc)


SHIPPED_TOPOLOGIES = ("mira", "cesnet", "ansnet")


def shipped_topology(name: str) -> Topology:
    """One of the bundled reconstructed topologies: ``mira``, ``cesnet`` or ``ansnet``."""
    from importlib.resources import files

    key = name.lower().removesuffix("-like").removesuffix(".json")
    if key not in SHIPPED_TOPOLOGIES:
        raise TopologyError(f"unknown bundled topology {name!r}; expected one of {SHIPPED_TOPOLOGIES}")
    return load_topology(files("bwroute").joinpath("topologies", f"{key}.json").read_text())
