"""Load a bundled topology and look at its offline criticality table.

Each ingress/egress pair's paths are enumerated up to a hop limit, and every
link gets the share of those paths it lies on. Links near 1.0 are ones a
pair can hardly avoid.

    python demos/01_topology_and_criticality.py
"""

from bwroute.network import shipped_topology
from bwroute.paths import build_criticality_table

topo = shipped_topology("mira")
g = topo.graph
print(f"{topo.name}: {g.n_nodes} nodes, {g.n_links} directed links")

table = build_criticality_table(g, topo.pair_keys)
for i, pair in enumerate(table.pairs):
    rates = table.rates[i]
    top = sorted(range(g.n_links), key=lambda l: -rates[l])[:3]
    busiest = ", ".join(f"{g.src[l]}->{g.dst[l]} ({table.crit_fraction(pair, l)})" for l in top)
    print(f"pair {pair}: {table.path_counts[i]} paths within {table.hop_limits[i]} hops; most used: {busiest}")
