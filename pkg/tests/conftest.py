import random

import pytest

from bwroute.network import NetworkGraph


@pytest.fixture
def diamond():
    # s=0, a=1, b=2, t=3
    return NetworkGraph.from_edges(4, [(0, 1, 10), (1, 3, 10), (0, 2, 10), (2, 3, 10)])


@pytest.fixture
def diamond_ab():
    return NetworkGraph.from_edges(4, [(0, 1, 10), (1, 3, 10), (0, 2, 10), (2, 3, 10), (1, 2, 10)])


@pytest.fixture
def chain():
    return NetworkGraph.from_edges(4, [(0, 1, 7), (1, 2, 4), (2, 3, 9)])


def random_graph(rng: random.Random, n: int, p: float, cap_max: int = 20, cap_min: int = 1) -> NetworkGraph:
    edges = [
        (u, v, rng.randint(cap_min, cap_max))
        for u in range(n)
        for v in range(n)
        if u != v and rng.random() < p
    ]
    if not edges:
        edges = [(0, 1, rng.randint(cap_min, cap_max))]
    return NetworkGraph.from_edges(n, edges)


@pytest.fixture
def make_random_graph():
    return random_graph


# --- acceptance report --------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Call as ``criterion(name, ok, detail)``; records one PASS/FAIL line and asserts."""

    def report(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
