import pytest
from hypothesis import strategies as st

from tdl.graphs import KOutDigraph, UndirectedGraph


@pytest.fixture
def triple():
    """The complete 2-out digraph on 3 nodes (all six directed links)."""
    return KOutDigraph(3, ((2, 3), (1, 3), (1, 2)))


@st.composite
def digraphs(draw, max_n=9):
    n = draw(st.integers(0, max_n))
    out = []
    for i in range(1, n + 1):
        others = [j for j in range(1, n + 1) if j != i]
        out.append(tuple(draw(st.lists(st.sampled_from(others), unique=True)) if others else ()))
    return KOutDigraph(n, tuple(out))


@st.composite
def undirected_graphs(draw, max_n=9):
    n = draw(st.integers(0, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return UndirectedGraph(n, tuple(edges))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
