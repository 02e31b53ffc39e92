"""Watch RRATE's per-pair race settle.

While a pair is learning, every candidate path is costed and the cheapest one
earns a reward. Once a reward reaches N the pair stops costing paths and just
takes the best-rewarded candidate that fits.

    python demos/06_rrate_learning.py
"""

from bwroute.algorithms import RrateParams, RrateState
from bwroute.network import Demand, shipped_topology

topo = shipped_topology("mira")
g = topo.graph.copy()
state = RrateState(g, topo.pair_keys, RrateParams(k=4, N=3))
pair = topo.pair_keys[0]
for i in range(6):
    before = state.cost_evaluations
    sel = state.select(g, Demand(i, *pair, 11))
    g.reserve(sel.path, 11)
    print(f"demand {i}: {sel.stage:13s} path {g.path_nodes(sel.path)}  "
          f"rewards {state.rewards[pair]}  cost evaluations +{state.cost_evaluations - before}")
