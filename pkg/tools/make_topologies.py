"""Regenerate the bundled topology documents.

The edge sets are reconstructions: node counts, capacity classes, ie pairs,
request weights and bandwidth menus follow the experimental setup, while the
links themselves were laid out by hand to give each ingress/egress pair a
handful of alternative routes with shared bottlenecks.

    python tools/make_topologies.py
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "bwroute" / "topologies"


def document(name, n, edges, pairs, weights, menu, note, rate, holding):
    return {
        "name": name,
        "note": note,
        "nodes": n,
        "links": [
            {"id": i, "from": u, "to": v, "capacity": c, "bidirectional": True}
            for i, (u, v, c) in enumerate(edges)
        ],
        "ie_pairs": [
            {"ingress": i, "egress": e, "request_weight": w} for (i, e), w in zip(pairs, weights)
        ],
        "bandwidth_menu": menu,
        # defaults for the dynamic scenario: arrivals per time unit, mean holding time
        "dynamic": {"arrival_rate": rate, "mean_holding": holding},
    }


def mira_like():
    T, t = 4800, 1200
    edges = [
        (0, 1, t), (0, 2, t), (0, 5, t), (1, 2, t), (1, 6, t), (2, 3, t), (2, 6, T),
        (2, 7, t), (3, 4, t), (3, 6, t), (4, 5, t), (4, 9, t), (4, 10, t), (5, 6, T),
        (5, 10, t), (6, 7, T), (6, 11, T), (7, 8, t), (7, 12, t), (8, 9, t), (8, 13, t),
        (9, 10, t), (9, 14, t), (10, 11, T), (11, 12, t), (11, 13, t), (12, 13, t),
        (13, 14, t),
    ]
    pairs = [(0, 12), (4, 8), (3, 1), (4, 14)]
    return document(
        "mira-like", 15, edges, pairs, [10, 20, 30, 40], [5, 11, 17, 23],
        "15-node reconstruction; 4800-unit thick and 1200-unit thin links", 40, 20,
    )


def cesnet_like():
    T, t = 10000, 1000
    core = [2, 9, 10, 12, 14, 17]
    edges = [
        (2, 9, T), (9, 10, T), (10, 12, T), (12, 14, T), (14, 17, T), (17, 2, T),
        (9, 14, T), (10, 17, T),
    ]
    homing = {
        0: (2, 9), 1: (9, 10), 3: (10, 12), 4: (12, 14), 5: (14, 17), 6: (17, 2),
        7: (2, 10), 8: (9, 12), 11: (10, 14), 13: (12, 17), 15: (14, 2), 16: (17, 9),
        18: (2, 12), 19: (9, 14),
    }
    # busier access nodes get a thick uplink to their first core router
    thick_uplink = {0, 3, 4, 7, 8, 15, 19}
    for node, (a, b) in homing.items():
        edges.append((node, a, T if node in thick_uplink else t))
        edges.append((node, b, t))
    for u, v in [(0, 1), (3, 4), (5, 6), (7, 8), (11, 13), (15, 16), (18, 19)]:
        edges.append((u, v, t))
    assert all(c not in homing for c in core)
    pairs = [(0, 18), (1, 11), (3, 16), (4, 7), (5, 13), (6, 19), (15, 0), (19, 8)]
    return document(
        "cesnet-like", 20, edges, pairs, [5, 10, 15, 20, 5, 10, 15, 20], [40, 80, 120, 160],
        "20-node reconstruction; 10000-unit core and 1000-unit access links", 80, 30,
    )


def ansnet_like():
    c = 2000
    cols, rows = 8, 4
    node = lambda r, k: r * cols + k  # noqa: E731
    edges = []
    for r in range(rows):
        for k in range(cols - 1):
            edges.append((node(r, k), node(r, k + 1), c))
    for r in range(rows - 1):
        for k in range(cols):
            if (r + k) % 3 != 2:
                edges.append((node(r, k), node(r + 1, k), c))
    for u, v in [(1, 10), (5, 14), (17, 26), (21, 30), (11, 20), (3, 12)]:
        edges.append((u, v, c))
    pairs = [(0, 28), (1, 13), (2, 30), (3, 22), (4, 10), (6, 30), (8, 23), (21, 5), (17, 5), (20, 16)]
    weights = [15, 5, 15, 5, 15, 5, 15, 5, 15, 5]
    return document(
        "ansnet-like", 32, edges, pairs, weights, [20, 30, 40, 50],
        "32-node reconstruction laid out as a 4x8 geographic mesh; all links 2000 units", 60, 20,
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for doc in (mira_like(), cesnet_like(), ansnet_like()):
        path = OUT / f"{doc['name'].split('-')[0]}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{path}: {doc['nodes']} nodes, {len(doc['links'])} bidirectional links")


if __name__ == "__main__":
    main()
