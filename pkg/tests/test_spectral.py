from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PROPERTY_SETTINGS
from errors import ParameterError, PreconditionError
from graphs import DenseBipartiteGraph
from spectral import (
    bethe_hessian,
    bethe_hessian_pd,
    critical_t,
    density_inequality,
    incidence_transfer,
    induced_edges,
    lambda2,
    subgraph_density_check,
)
from transforms import edge_vertex_incidence


def test_second_eigenvalue_of_small_graphs(c6_bipartite, k33, c6, petersen):
    assert lambda2(c6_bipartite).lambda2 == pytest.approx(1.0)
    assert lambda2(k33).lambda2 == pytest.approx(0.0)
    assert lambda2(c6).lambda2 == pytest.approx(1.0)
    report = lambda2(petersen)
    assert report.lambda2 == pytest.approx(2.0)
    assert report.top == pytest.approx(3.0)
    assert report.ramanujan


def test_power_method_on_an_incidence_graph(petersen):
    H = edge_vertex_incidence(petersen)
    report = lambda2(H, method="power", seed=3)
    assert report.method == "power"
    assert report.lambda2 == pytest.approx(2.0, abs=1e-6)
    assert report.top == pytest.approx(math.sqrt(6), abs=1e-6)


def test_lps_graph_is_ramanujan(lps_5_13):
    dense = lambda2(lps_5_13, bound=2 * math.sqrt(5))
    assert dense.passed and dense.ramanujan
    assert dense.connected
    iterative = lambda2(lps_5_13, method="eigsh")
    assert iterative.lambda2 == pytest.approx(dense.lambda2, abs=1e-6)
    assert iterative.top == pytest.approx(6.0, abs=1e-6)


def test_disconnected_graph_is_noted():
    G = DenseBipartiteGraph(2, 2, [(0, 0), (1, 1)], name="2K2")
    report = lambda2(G)
    assert report.lambda2 == pytest.approx(1.0)
    assert not report.connected and report.notes


def test_unknown_method_is_rejected(c6):
    with pytest.raises(ParameterError):
        lambda2(c6, method="lanczos")
    with pytest.raises(ParameterError):
        lambda2(c6, method="power")


@pytest.mark.parametrize("name,graph,expected", [
    ("K4", nx.complete_graph(4), math.sqrt(2)),
    ("C6", nx.cycle_graph(6), math.sqrt(3)),
    ("Petersen", nx.petersen_graph(), 2.0),
])
def test_incidence_transfer(name, graph, expected):
    out = incidence_transfer(graph)
    assert out["predicted"] == pytest.approx(expected)
    assert out["measured"] == pytest.approx(expected, abs=1e-8)
    assert out["deviation"] < 1e-8
    assert out["pairing_deviation"] < 1e-8


def test_incidence_transfer_needs_regular_graph():
    with pytest.raises(ParameterError):
        incidence_transfer(nx.path_graph(4))


# ── Density ────────────────────────────────────────────────────────────────

def _ball(G: DenseBipartiteGraph, radius: int) -> list[int]:
    """Combined indices of the radius-`radius` ball around left vertex 0."""
    H = G.to_networkx()
    return sorted(nx.single_source_shortest_path_length(H, 0, cutoff=radius))


def test_density_of_a_tree_ball(lps_5_13):
    S = _ball(lps_5_13, 2)
    assert len(S) == 1 + 6 + 30
    check = subgraph_density_check(lps_5_13, S, 6, 6, 0.005, gate_waived=True)
    assert check.passed and not check.degenerate
    assert check.edges == 36
    assert check.rhs == pytest.approx((2 * math.sqrt(5) * 1.025) ** 2)


def test_whole_graph_exceeds_the_bound_once_the_gate_is_waived(lps_5_13):
    check = subgraph_density_check(lps_5_13, range(lps_5_13.n_vertices), None, None, 0.005,
                                   lambda2_value=2 * math.sqrt(5), gate_waived=True)
    assert check.lhs == pytest.approx(25.0)
    assert not check.passed


def test_density_preconditions(lps_5_13, c6_bipartite):
    with pytest.raises(PreconditionError):
        subgraph_density_check(lps_5_13, [0, 1092], 6, 6, 0.005)
    with pytest.raises(PreconditionError):
        subgraph_density_check(lps_5_13, [0], 6, 6, 0.05, gate_waived=True)
    with pytest.raises(PreconditionError):
        subgraph_density_check(lps_5_13, [0], 5, 6, 0.005, gate_waived=True)
    with pytest.raises(PreconditionError):
        subgraph_density_check(c6_bipartite, [0], 2, 2, 0.005, gate_waived=True)


def test_degenerate_sets_pass(lps_5_13):
    check = subgraph_density_check(lps_5_13, [0, 1, 2], 6, 6, 0.005, lambda2_value=4.0, gate_waived=True)
    assert check.degenerate and check.passed
    assert len(induced_edges(lps_5_13, [0, 1, 2])) == 0


# ── Bethe-Hessian ──────────────────────────────────────────────────────────

def test_bethe_hessian_matrix(k33):
    H = bethe_hessian(k33, range(6), 0.5)
    assert H.shape == (6, 6)
    assert H[0, 0] == pytest.approx(2 * 0.25 + 1)
    assert H[0, 3] == pytest.approx(-0.5)
    assert H[0, 1] == 0


def test_critical_t_of_k33(k33):
    assert critical_t(k33, range(6)) == pytest.approx(0.5, abs=1e-5)
    assert bethe_hessian_pd(k33, range(6), 0.45)
    assert not bethe_hessian_pd(k33, range(6), 0.55)


def test_cycle_is_critical_at_one(c6_bipartite):
    assert critical_t(c6_bipartite, range(6)) == pytest.approx(1.0, abs=1e-5)
    assert not bethe_hessian_pd(c6_bipartite, range(6), 1.0)


def test_empty_set_is_rejected(k33):
    with pytest.raises(ParameterError):
        bethe_hessian_pd(k33, [], 0.5)


@PROPERTY_SETTINGS
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_positive_definite_hessian_implies_density_bound(seed, t):
    rng = np.random.default_rng(seed)
    G = edge_vertex_incidence(nx.random_regular_graph(3, 10, seed=int(rng.integers(2**31))))
    size = int(rng.integers(4, G.n_vertices + 1))
    S = sorted(rng.choice(G.n_vertices, size=size, replace=False).tolist())
    if bethe_hessian_pd(G, S, t):
        assert density_inequality(G, S, t)["holds"]


def test_critical_t_is_a_threshold(lps_5_13):
    S = _ball(lps_5_13, 3)
    t0 = critical_t(lps_5_13, S)
    assert 0 < t0 <= 1
    assert bethe_hessian_pd(lps_5_13, S, 0.9 * t0)
    if t0 < 1:
        assert not bethe_hessian_pd(lps_5_13, S, min(1.0, t0 + 1e-3))


@pytest.mark.slow
def test_incidence_transfer_on_lps(lps_5_13):
    out = incidence_transfer(lps_5_13)
    assert out["d"] == 6
    assert out["measured"] == pytest.approx(out["predicted"], abs=1e-5)


@pytest.mark.slow
def test_random_small_sets_meet_the_density_bound(lps_5_13):
    lam = lambda2(lps_5_13).lambda2
    rng = np.random.default_rng(13)
    for _ in range(1000):
        size = int(rng.integers(2, 41))
        S = rng.choice(lps_5_13.n_vertices, size=size, replace=False).tolist()
        check = subgraph_density_check(lps_5_13, S, 6, 6, 0.005, lambda2_value=lam, gate_waived=True)
        assert check.passed, check.to_dict()
