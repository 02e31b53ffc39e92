"""Max flow and critical links on a small network.

A link is critical for a pair when it sits in some minimum cut: taking one
unit of its residual away lowers the pair's max flow. This script checks that
directly for every link.

    python demos/02_critical_links.py
"""

from bwroute.maxflow import critical_links, max_flow
from bwroute.network import NetworkGraph

# two routes from 0 to 5 that merge on 3->5
g = NetworkGraph.from_edges(
    6, [(0, 1, 8), (1, 3, 6), (0, 2, 5), (2, 3, 9), (3, 5, 10), (2, 4, 2), (4, 5, 1)]
)
res = max_flow(g, 0, 5)
crit = critical_links(g, 0, 5)
print(f"max flow 0->5: {res.flow_value}")
for lid in range(g.n_links):
    g.residual[lid] -= 1
    drop = res.flow_value - max_flow(g, 0, 5).flow_value
    g.residual[lid] += 1
    mark = "critical" if lid in crit else ""
    print(f"  {g.src[lid]}->{g.dst[lid]} cap {g.capacity[lid]:2d} flow {res.flow[lid]:2d}  drop if shaved: {drop}  {mark}")
