"""Sweep TEARD's (k1, k2, k3) over a 0.1 grid and show the extremes.

    python demos/05_moderation_sweep.py
"""

from bwroute.network import shipped_topology
from bwroute.simulation import simplex_grid, sweep_teard
from bwroute.workload import WorkloadConfig, gen_demands

topo = shipped_topology("ansnet")
trace = gen_demands(WorkloadConfig("static", count=600, seed=0), topo.ie_pairs, topo.bandwidth_menu)
rows = sweep_teard(topo, trace, simplex_grid("0.1"))
print(f"{len(rows)} triples")
for label, chunk in (("best", rows[:3]), ("worst", rows[-3:])):
    for r in chunk:
        print(f"  {label:5s} k=({float(r.k1):.1f}, {float(r.k2):.1f}, {float(r.k3):.1f})  {r.acceptance_pct:.2f}%")
print(f"spread {rows[0].acceptance_pct - rows[-1].acceptance_pct:.2f} points")
