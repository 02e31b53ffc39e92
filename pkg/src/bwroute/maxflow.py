"""Maximum flow over residual bandwidths and min-cut critical links."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .network import NetworkGraph


@dataclass(frozen=True)
class FlowResult:
    flow_value: int
    flow: tuple[int, ...]
    source_side: frozenset[int]
    sink_side: frozenset[int]


def _edmonds_karp(n, src, dst, cap, out_links, in_links, s, t):
    flow = [0] * len(cap)
    total = 0
    while True:
        # parent[v] = (link id, +1 forward / -1 backward)
        parent: list = [None] * n
        parent[s] = (-1, 0)
        queue = deque([s])
        while queue and parent[t] is None:
            u = queue.popleft()
            for lid in out_links[u]:
                v = dst[lid]
                if parent[v] is None and flow[lid] < cap[lid]:
                    parent[v] = (lid, 1)
                    queue.append(v)
            for lid in in_links[u]:
                v = src[lid]
                if parent[v] is None and flow[lid] > 0:
                    parent[v] = (lid, -1)
                    queue.append(v)
        if parent[t] is None:
            return total, flow, parent
        push = None
        v = t
        while v != s:
            lid, d = parent[v]
            room = cap[lid] - flow[lid] if d > 0 else flow[lid]
            push = room if push is None else min(push, room)
            v = src[lid] if d > 0 else dst[lid]
        v = t
        while v != s:
            lid, d = parent[v]
            flow[lid] += d * push
            v = src[lid] if d > 0 else dst[lid]
        total += push


def _reaching(n, src, dst, cap, flow, out_links, in_links, t):
    """Nodes with a residual path to ``t``."""
    seen = [False] * n
    seen[t] = True
    queue = deque([t])
    while queue:
        v = queue.popleft()
        # residual arc u->v exists for forward link u->v with spare room,
        # or for a link v->u that carries flow
        for lid in in_links[v]:
            u = src[lid]
            if not seen[u] and flow[lid] < cap[lid]:
                seen[u] = True
                queue.append(u)
        for lid in out_links[v]:
            u = dst[lid]
            if not seen[u] and flow[lid] > 0:
                seen[u] = True
                queue.append(u)
    return frozenset(i for i in range(n) if seen[i])


def max_flow(graph: NetworkGraph, source: int, sink: int) -> FlowResult:
    """Maximum ``source -> sink`` flow with link capacities set to current residuals.

    Uses breadth-first augmenting paths (Edmonds-Karp), so the result is exact
    for integer residuals.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    n = graph.n_nodes
    cap = graph.residual
    value, flow, parent = _edmonds_karp(
        n, graph.src, graph.dst, cap, graph.out_links, graph.in_links, source, sink
    )
    source_side = frozenset(i for i in range(n) if parent[i] is not None)
    sink_side = _reaching(n, graph.src, graph.dst, cap, flow, graph.out_links, graph.in_links, sink)
    return FlowResult(value, tuple(flow), source_side, sink_side)


def _components(n, src, dst, cap, flow, out_links, in_links):
    """Strongly connected components of the residual graph (iterative Kosaraju)."""

    def succ(u):
        for lid in out_links[u]:
            if flow[lid] < cap[lid]:
                yield dst[lid]
        for lid in in_links[u]:
            if flow[lid] > 0:
                yield src[lid]

    def pred(v):
        for lid in in_links[v]:
            if flow[lid] < cap[lid]:
                yield src[lid]
        for lid in out_links[v]:
            if flow[lid] > 0:
                yield dst[lid]

    order = []
    visited = [False] * n
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        stack = [(root, succ(root))]
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if not visited[nxt]:
                    visited[nxt] = True
                    stack.append((nxt, succ(nxt)))
                    break
            else:
                stack.pop()
                order.append(node)

    comp = [-1] * n
    label = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        comp[root] = label
        stack = [root]
        while stack:
            u = stack.pop()
            for w in pred(u):
                if comp[w] == -1:
                    comp[w] = label
                    stack.append(w)
        label += 1
    return comp


def critical_links(graph: NetworkGraph, source: int, sink: int) -> frozenset[int]:
    """Links that lie in at least one minimum ``source``-``sink`` cut.

    A link is in some minimum cut iff a maximum flow saturates it and the
    residual graph has no path from its tail to its head. Saturated links with
    positive flow always have a residual arc head -> tail, so the second
    condition reduces to tail and head sitting in different strongly
    connected components of the residual graph.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    n = graph.n_nodes
    cap = graph.residual
    value, flow, _ = _edmonds_karp(
        n, graph.src, graph.dst, cap, graph.out_links, graph.in_links, source, sink
    )
    if value == 0:
        return frozenset()
    comp = _components(n, graph.src, graph.dst, cap, flow, graph.out_links, graph.in_links)
    src, dst = graph.src, graph.dst
    return frozenset(
        lid
        for lid, c in enumerate(cap)
        if c > 0 and flow[lid] == c and comp[src[lid]] != comp[dst[lid]]
    )
