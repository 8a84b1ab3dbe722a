from __future__ import annotations

from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PROPERTY_SETTINGS
from errors import ParameterError
from gadget_search import sample_biregular
from graphs import LEFT, RIGHT, DenseBipartiteGraph
from transforms import TripartiteOracle, canonical_edges, edge_vertex_incidence, tripartite_product


def _matching_free_gadget() -> DenseBipartiteGraph:
    """K_{3,3} minus a perfect matching: (2,2)-biregular on 3+3."""
    return DenseBipartiteGraph(3, 3, [(i, j) for i in range(3) for j in range(3) if i != j], name="H")


def test_incidence_of_k4(k4):
    H = edge_vertex_incidence(k4)
    assert (H.n_left, H.n_right, H.n_edges) == (6, 4, 12)
    assert H.is_biregular(2, 3)
    assert H.name == "EV(K4)"


def test_incidence_of_petersen(petersen):
    H = edge_vertex_incidence(petersen, name="EV(P)")
    assert H.is_biregular(2, 3)
    assert (H.n_left, H.n_right) == (15, 10)


def test_incidence_of_bipartite_input(lps_5_13):
    H = edge_vertex_incidence(lps_5_13)
    assert (H.n_left, H.n_right) == (6552, 2184)
    assert H.is_biregular(2, 6)


def test_canonical_edges_are_sorted(c6):
    n, pairs = canonical_edges(c6)
    assert n == 6
    assert np.all(pairs[:, 0] < pairs[:, 1])
    assert pairs.tolist() == sorted(pairs.tolist())


@pytest.mark.parametrize("graph", [
    nx.path_graph(4),
    nx.MultiGraph([(0, 1), (0, 1), (1, 2), (2, 0)]),
    nx.Graph([(0, 0), (0, 1)]),
])
def test_incidence_rejects_bad_input(graph):
    with pytest.raises(ParameterError):
        edge_vertex_incidence(graph)


def test_product_of_incidence_graphs(k4):
    G1 = edge_vertex_incidence(k4)
    G2 = G1.transpose()
    G = tripartite_product(G1, G2, _matching_free_gadget())
    assert (G.n_left, G.n_right) == (6, 6)
    assert G.n_edges == 4 * 6
    assert G.is_biregular(4, 4)


def test_product_rejects_mismatched_factors(k4, petersen):
    G1 = edge_vertex_incidence(k4)
    G2 = edge_vertex_incidence(petersen).transpose()
    with pytest.raises(ParameterError):
        tripartite_product(G1, G2, _matching_free_gadget())
    with pytest.raises(ParameterError):
        tripartite_product(G1, G1.transpose(), DenseBipartiteGraph(2, 3, [(0, 0), (1, 1)]))


@st.composite
def factor_triples(draw: st.DrawFn):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    D1 = draw(st.integers(1, 3))
    D2 = draw(st.integers(1, 3))
    n_mid = draw(st.integers(1, 4)) * 6
    c1, c2 = draw(st.sampled_from([1, 2, 3, 6])), draw(st.sampled_from([1, 2, 3, 6]))
    G1 = sample_biregular(n_mid * D1 // c1, n_mid, c1, D1, rng)
    G2 = sample_biregular(n_mid, n_mid * D2 // c2, D2, c2, rng)
    mask = rng.random((D1, D2)) < 0.6
    G0 = DenseBipartiteGraph(D1, D2, np.argwhere(mask))
    return G1, G2, G0


@PROPERTY_SETTINGS
@given(factor_triples())
def test_product_edges_match_definition(triple):
    G1, G2, G0 = triple
    G = tripartite_product(G1, G2, G0)
    assert G.n_edges == G1.n_right * G0.n_edges
    expected = Counter()
    for w in range(G1.n_right):
        left = G1.neighbors(RIGHT, w)
        right = G2.neighbors(LEFT, w)
        for i, j in G0.edges:
            expected[(int(left[i]), int(right[j]))] += 1
    assert Counter(map(tuple, G.edges.tolist())) == expected


def test_oracle_matches_materialized_product(k4, petersen):
    G1 = edge_vertex_incidence(petersen)
    G2 = G1.transpose()
    G0 = DenseBipartiteGraph(3, 3, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)], name="C6")
    oracle = TripartiteOracle(G1, G2, G0)
    dense = tripartite_product(G1, G2, G0)
    assert oracle.materialize().same_edges(dense)
    for x in range(oracle.n_left):
        for slot in range(oracle.d_left):
            y, back = oracle.neighbor(LEFT, x, slot)
            assert oracle.neighbor(RIGHT, y, back) == (x, slot)
