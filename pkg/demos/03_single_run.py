"""One dynamic simulation with TEARD, reporting acceptance over time.

    python demos/03_single_run.py
"""

from bwroute.algorithms import AlgorithmConfig
from bwroute.network import shipped_topology
from bwroute.simulation import run_simulation
from bwroute.workload import WorkloadConfig, gen_demands

topo = shipped_topology("mira")
trace = gen_demands(
    WorkloadConfig("dynamic", count=2000, arrival_rate=40, mean_holding=20, seed=1),
    topo.ie_pairs,
    topo.bandwidth_menu,
)
res = run_simulation(topo, AlgorithmConfig("TEARD"), trace, seed=1, window=300)
print(f"accepted {res.accepted} of {res.total} ({res.acceptance_pct:.2f}%), "
      f"mean handling time {res.mean_duration_ms:.3f} ms")

series = res.windowed()
for n in range(300, res.total + 1, 300):
    print(f"  last 300 demands up to #{n}: {series[n - 1]:.1f}% accepted")
