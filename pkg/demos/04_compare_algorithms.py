"""All five algorithms on one static trace, in the "acceptance - ms" layout.

    python demos/04_compare_algorithms.py
"""

from bwroute.network import shipped_topology
from bwroute.simulation import compare_algorithms
from bwroute.workload import WorkloadConfig, gen_demands

topo = shipped_topology("cesnet")
trace = gen_demands(WorkloadConfig("static", count=1000, seed=3), topo.ie_pairs, topo.bandwidth_menu)
report = compare_algorithms(topo, trace)
print(report.format([100, 250, 500, 750, 1000]))

rrate = report.results["RRATE"]
print(f"\nRRATE learning stage {rrate.stage_duration_ms('learning'):.3f} ms/demand, "
      f"after learning {rrate.stage_duration_ms('post-learning'):.3f} ms/demand")
