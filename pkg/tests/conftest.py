from __future__ import annotations

import pytest
from hypothesis import strategies as st

from lgstat.graph import Coloring, Graph


@st.composite
def graphs(draw, n_max: int = 12, d_max: int = 4, n_min: int = 1) -> Graph:
    """Random simple graph with max degree <= a drawn bound d (declared d)."""
    n = draw(st.integers(n_min, n_max))
    d = draw(st.integers(0, d_max))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = draw(st.permutations(pairs)) if pairs else []
    keep = draw(st.lists(st.booleans(), min_size=len(order), max_size=len(order)))
    deg = [0] * n
    edges = []
    for (u, v), take in zip(order, keep):
        if take and deg[u] < d and deg[v] < d:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, edges, d)


@st.composite
def colorings(draw, n: int, k_max: int = 3) -> Coloring:
    k = draw(st.integers(1, k_max))
    colors = draw(st.lists(st.integers(1, k), min_size=n, max_size=n))
    return Coloring(k, tuple(colors))


@st.composite
def colored_graphs(draw, n_max: int = 12, d_max: int = 4, k_max: int = 3):
    G = draw(graphs(n_max, d_max))
    return G, draw(colorings(G.n, k_max))


# ---------------------------------------------------------------- acceptance reporting

_CRITERIA: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "FAIL"
        line = f"{status}  criterion {marker.args[0]}"
        _CRITERIA.append((marker.args[0], line))


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in _CRITERIA:
            terminalreporter.write_line(line)
