"""Shared fixtures: the small graph corpus and the hypothesis profile."""

from __future__ import annotations

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cd_graph import CdGraph, CdParams
from graphs import DenseBipartiteGraph
from lps import LpsGraph, LpsParams

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


def cycle_bipartite(n: int) -> DenseBipartiteGraph:
    """Even cycle C_n as a bipartite graph on n/2 + n/2 vertices."""
    half = n // 2
    edges = [(i, i) for i in range(half)] + [(i, (i + 1) % half) for i in range(half)]
    return DenseBipartiteGraph(half, half, edges, name=f"C{n}")


@st.composite
def bipartite_graphs(draw: st.DrawFn, max_side: int = 8, max_edges: int = 24) -> DenseBipartiteGraph:
    """Small bipartite multigraph-free graphs."""
    n_left = draw(st.integers(min_value=1, max_value=max_side))
    n_right = draw(st.integers(min_value=1, max_value=max_side))
    pairs = st.tuples(st.integers(0, n_left - 1), st.integers(0, n_right - 1))
    edges = draw(st.lists(pairs, unique=True, max_size=min(max_edges, n_left * n_right)))
    return DenseBipartiteGraph(n_left, n_right, edges, name="drawn")


def random_bipartite(rng: np.random.Generator, n_left: int, n_right: int, m: int) -> DenseBipartiteGraph:
    keys = rng.choice(n_left * n_right, size=min(m, n_left * n_right), replace=False)
    return DenseBipartiteGraph(n_left, n_right, np.column_stack([keys // n_right, keys % n_right]), name="random")


@pytest.fixture
def c6() -> nx.Graph:
    G = nx.cycle_graph(6)
    G.name = "C6"
    return G


@pytest.fixture
def c6_bipartite() -> DenseBipartiteGraph:
    return cycle_bipartite(6)


@pytest.fixture
def k4() -> nx.Graph:
    G = nx.complete_graph(4)
    G.name = "K4"
    return G


@pytest.fixture
def petersen() -> nx.Graph:
    G = nx.petersen_graph()
    G.name = "Petersen"
    return G


@pytest.fixture
def k33() -> DenseBipartiteGraph:
    return DenseBipartiteGraph(3, 3, [(i, j) for i in range(3) for j in range(3)], name="K33")


@pytest.fixture(scope="session")
def lps_5_13() -> DenseBipartiteGraph:
    return LpsGraph(LpsParams.build(5, 13)).materialize()


@pytest.fixture(scope="session")
def cd_7_3() -> DenseBipartiteGraph:
    return CdGraph(CdParams(7, 3, (1, 2), (1, 2))).materialize()


@pytest.fixture(scope="session")
def cd_7_5() -> DenseBipartiteGraph:
    return CdGraph(CdParams(7, 5, (1, 2), (1, 2, 3, 4))).materialize()


@pytest.fixture
def catalog(tmp_path, monkeypatch) -> str:
    directory = str(tmp_path / "gadgets")
    monkeypatch.setenv("FORGE_CATALOG_DIR", directory)
    return directory
