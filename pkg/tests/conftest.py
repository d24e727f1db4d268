import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from ercoarsen import build_hypergraph

ROOT = Path(__file__).resolve().parents[1]
IBM_DIR = Path(os.environ.get("ERCOARSEN_IBM_DIR", ROOT / "benchmarks" / "ispd98"))

# nine nodes and four hyperedges written 1-based; the fixture renumbers to 0..8
NINE_NODE_EDGES = [[1, 2, 3, 4], [3, 6, 7, 8], [4, 5, 6], [8, 9]]


@pytest.fixture
def path4():
    return build_hypergraph([[0, 1], [1, 2], [2, 3]], num_nodes=4)


@pytest.fixture
def nine_node():
    return build_hypergraph([[p - 1 for p in e] for e in NINE_NODE_EDGES], num_nodes=9)


def random_hypergraph(rng, n=12, m=20, max_size=5, weighted=True):
    edges = []
    for _ in range(m):
        s = int(rng.integers(2, max_size + 1))
        edges.append(rng.choice(n, size=s, replace=False).tolist())
    w = rng.uniform(0.5, 3.0, size=m) if weighted else None
    return build_hypergraph(edges, w, n)


@st.composite
def hypergraphs(draw, min_nodes=3, max_nodes=12, max_edges=15):
    n = draw(st.integers(min_nodes, max_nodes))
    edges = draw(st.lists(
        st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 5), unique=True),
        min_size=1, max_size=max_edges))
    weights = draw(st.lists(st.floats(0.1, 10.0), min_size=len(edges), max_size=len(edges)))
    return build_hypergraph(edges, weights, n)


# one pass/fail line per acceptance criterion, printed after the run
_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    def record(number, ok, detail):
        _ACCEPTANCE.append((number, ok, detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
