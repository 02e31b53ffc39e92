import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwroute.network import (
    AccountingError,
    Demand,
    NetworkGraph,
    ReservationError,
    TopologyError,
    load_topology,
    shipped_topology,
)


def tiny_doc(**over):
    doc = {
        "nodes": 2,
        "links": [{"id": 0, "from": 0, "to": 1, "capacity": 10, "bidirectional": True}],
        "ie_pairs": [{"ingress": 0, "egress": 1, "request_weight": 1}],
        "bandwidth_menu": [1, 2],
    }
    doc.update(over)
    return doc


def test_smallest_topology_expands_bidirectional():
    topo = load_topology(tiny_doc())
    g = topo.graph
    assert g.n_nodes == 2 and g.n_links == 2
    assert g.residual == [10, 10]
    assert (g.src[1], g.dst[1]) == (1, 0)


def test_load_from_json_text_and_file(tmp_path):
    text = json.dumps(tiny_doc())
    assert load_topology(text).graph.n_links == 2
    path = tmp_path / "t.json"
    path.write_text(text)
    assert load_topology(path).graph.n_links == 2
    assert load_topology(str(path)).graph.n_links == 2


def test_reverse_link_ids_offset_by_declared_count():
    doc = tiny_doc(
        nodes=3,
        links=[
            {"id": 0, "from": 0, "to": 1, "capacity": 5, "bidirectional": True},
            {"id": 1, "from": 1, "to": 2, "capacity": 7, "bidirectional": True},
        ],
    )
    g = load_topology(doc).graph
    assert (g.src[2], g.dst[2], g.capacity[2]) == (1, 0, 5)
    assert (g.src[3], g.dst[3], g.capacity[3]) == (2, 1, 7)


def test_mira_like_shipped_parameters():
    topo = shipped_topology("mira")
    assert topo.graph.n_nodes == 15
    assert set(topo.graph.capacity) == {4800, 1200}
    assert topo.pair_keys == [(0, 12), (4, 8), (3, 1), (4, 14)]
    assert topo.bandwidth_menu == [5, 11, 17, 23]
    assert [p.request_weight for p in topo.ie_pairs] == [10, 20, 30, 40]


def test_cesnet_and_ansnet_shipped_parameters():
    ces = shipped_topology("cesnet-like")
    assert ces.graph.n_nodes == 20
    assert set(ces.graph.capacity) == {10000, 1000}
    assert ces.pair_keys == [(0, 18), (1, 11), (3, 16), (4, 7), (5, 13), (6, 19), (15, 0), (19, 8)]
    assert ces.bandwidth_menu == [40, 80, 120, 160]
    ans = shipped_topology("ansnet")
    assert ans.graph.n_nodes == 32
    assert set(ans.graph.capacity) == {2000}
    assert len(ans.ie_pairs) == 10
    assert ans.bandwidth_menu == [20, 30, 40, 50]
    assert sorted({p.request_weight for p in ans.ie_pairs}) == [5, 15]


@pytest.mark.parametrize(
    "change, fragment",
    [
        ({"nodes": 5, "links": [{"id": 0, "from": 0, "to": 99, "capacity": 3}]}, "node 99"),
        ({"links": [{"id": 0, "from": 0, "to": 1, "capacity": 0}]}, "non-positive capacity"),
        ({"links": [{"id": 0, "from": 1, "to": 1, "capacity": 4}]}, "self-loop"),
        ({"ie_pairs": [{"ingress": 0, "egress": 0}]}, "ingress equals egress"),
        ({"ie_pairs": [{"ingress": 0, "egress": 1, "request_weight": 0}]}, "sum to zero"),
        ({"bandwidth_menu": [0]}, "positive integer"),
        ({"links": "nope"}, "non-empty list"),
    ],
)
def test_load_errors_name_the_element(change, fragment):
    with pytest.raises(TopologyError, match=fragment):
        load_topology(tiny_doc(**change))


def test_missing_file():
    with pytest.raises(TopologyError, match="cannot read"):
        load_topology("/nonexistent/topo.json")


def test_reserve_exact_fill(chain):
    g = NetworkGraph.from_edges(3, [(0, 1, 10), (1, 2, 10)])
    g.reserve([0, 1], 10)
    assert g.residual == [0, 0]


def test_reserve_is_atomic():
    g = NetworkGraph.from_edges(4, [(0, 1, 100), (1, 2, 5), (2, 3, 60)])
    with pytest.raises(ReservationError):
        g.reserve([0, 1, 2], 11)
    assert g.residual == [100, 5, 60]


def test_reserve_subtracts_on_each_link():
    g = NetworkGraph.from_edges(4, [(0, 1, 100), (1, 2, 40), (2, 3, 60)])
    g.reserve([0, 1, 2], 40)
    assert g.residual == [100 - 40, 40 - 40, 60 - 40]


def test_release_restores_and_guards_overflow(chain):
    before = list(chain.residual)
    chain.reserve([0, 1], 3)
    chain.release([0, 1], 3)
    assert chain.residual == before
    with pytest.raises(AccountingError):
        chain.release([0], 5)
    assert chain.residual == before


def test_interleaved_reservations_match_ledger():
    g = NetworkGraph.from_edges(4, [(0, 1, 50), (1, 2, 50), (2, 3, 50), (0, 2, 50)])
    held = {}
    g.reserve([0, 1], 10); held["a"] = ([0, 1], 10)
    g.reserve([3, 2], 15); held["b"] = ([3, 2], 15)
    g.reserve([1, 2], 7); held["c"] = ([1, 2], 7)
    g.release(*held.pop("a"))
    expected = list(g.capacity)
    for path, b in held.values():
        for lid in path:
            expected[lid] -= b
    assert g.residual == expected


def test_prune_threshold():
    g = NetworkGraph.from_edges(4, [(0, 1, 5), (1, 2, 11), (2, 3, 17)])
    view = g.prune_infeasible(11)
    assert view.link_ids == [1, 2]
    assert g.prune_infeasible(1).link_ids == [0, 1, 2]
    assert len(g.prune_infeasible(18)) == 0
    # non-mutating and repeatable
    assert g.prune_infeasible(11) == view
    assert g.residual == [5, 11, 17]


def test_demand_validation():
    with pytest.raises(ValueError):
        Demand(0, 0, 1, 0)


def test_simple_path_check(diamond_ab):
    assert diamond_ab.is_simple_path([0, 4, 3], 0, 3)
    assert not diamond_ab.is_simple_path([0, 3], 0, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 3), st.integers(1, 30)), max_size=40))
def test_residual_matches_ledger(ops):
    g = NetworkGraph.from_edges(4, [(0, 1, 40), (1, 2, 30), (2, 3, 50), (0, 2, 25), (1, 3, 35)])
    paths = [[0, 1, 2], [3, 2], [0, 4], [1]]
    held = []
    for is_reserve, which, b in ops:
        if is_reserve or not held:
            try:
                g.reserve(paths[which], b)
                held.append((paths[which], b))
            except ReservationError:
                pass
        else:
            g.release(*held.pop(which % len(held)))
        g.check_invariants()
    expected = list(g.capacity)
    for path, b in held:
        for lid in path:
            expected[lid] -= b
    assert g.residual == expected
