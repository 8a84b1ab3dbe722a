from __future__ import annotations

import numpy as np
import pytest

from cd_graph import (
    CdGraph,
    CdParams,
    cd_brute_force_count,
    cd_closed_form_count,
    cd_graph,
    cd_index_to_vertex,
    cd_manifest,
    cd_neighbor,
    cd_vertex_count,
    cd_vertex_to_index,
)
from dkq import LINE, POINT, DkqGraph, DkqVertex, all_coordinates, batch_certificates, certificate
from errors import NotInComponent, ParameterError
from field_arith import count_field_ops
from graphs import DenseBipartiteGraph
from verification import girth

SMALL = CdParams(7, 3, (1, 2), (1, 2))
UNBALANCED = CdParams(7, 5, (1, 2), (1, 2, 3, 4))


def test_parameters_are_validated():
    with pytest.raises(ParameterError):
        CdParams(8, 3, (1,), (1,))
    with pytest.raises(ParameterError):
        CdParams(7, 3, (1, 3), (1,))
    with pytest.raises(ParameterError):
        CdParams(7, 3, (), (1,))
    with pytest.raises(ParameterError):
        CdParams(7, 4, (1,), (1,))


def test_selectors_are_sorted_and_deduplicated():
    params = CdParams(7, 5, (3, 1, 3), (2,))
    assert params.A == (1, 3)
    assert CdParams.from_degrees(7, 5, 2, 4) == UNBALANCED


def test_small_instance_shape():
    G = CdGraph(SMALL)
    assert (G.n_left, G.d_left, G.d_right) == (486, 2, 2)
    dense = G.materialize()
    assert dense.is_biregular(2, 2)
    assert girth(dense) >= SMALL.k + 4


def test_unbalanced_instance_is_four_two_biregular(cd_7_5):
    assert cd_7_5.is_biregular(4, 2)
    assert cd_7_5.n_left * 4 == cd_7_5.n_right * 2 == cd_7_5.n_edges


@pytest.mark.parametrize("side", [POINT, LINE])
def test_enumerated_count_matches_brute_force(side):
    assert cd_vertex_count(SMALL, side) == cd_brute_force_count(SMALL, side)


def test_closed_form_discrepancy_is_reported():
    manifest = cd_manifest(SMALL)
    enumerated = cd_vertex_count(SMALL, POINT)
    closed = cd_closed_form_count(SMALL, POINT)
    assert manifest["counts"]["points"] == {"enumerated": enumerated, "closed_form": closed,
                                            "agree": enumerated == closed}
    if enumerated != closed:
        assert any("differs from closed form" in note for note in manifest["notes"])
    assert manifest["r"] == 2 and manifest["r_alternative"] == 2


@pytest.mark.parametrize("side", [POINT, LINE])
def test_index_bijection_round_trips_exhaustively(side):
    G = CdGraph(SMALL)
    seen = set()
    for i in range(G.size(side)):
        u = G.index_to_vertex(side, i)
        assert u.coords[0] in SMALL.selectors(side)
        assert certificate(u, SMALL.r).is_zero()
        assert G.vertex_to_index(side, u) == i
        seen.add(u.coords)
    assert len(seen) == G.size(side)


def test_first_index_is_smallest_vertex():
    u = cd_index_to_vertex(SMALL, POINT, 0)
    assert u.coords[0] == SMALL.A[0]
    assert cd_vertex_to_index(SMALL, POINT, u) == 0


def test_non_members_are_rejected():
    G = CdGraph(SMALL)
    with pytest.raises(NotInComponent):
        G.vertex_to_index(POINT, DkqVertex(POINT, (0,) * 7, 3))
    u = G.index_to_vertex(POINT, 5)
    with pytest.raises(NotInComponent):
        G.vertex_to_index(LINE, u)
    bad = list(u.coords)
    bad[5] = (bad[5] + 1) % 3
    with pytest.raises(NotInComponent):
        G.vertex_to_index(POINT, DkqVertex(POINT, tuple(bad), 3))


@pytest.mark.slow
def test_oracle_matches_restriction_of_full_graph(cd_7_5):
    """Rebuild CD(7,5,A,B) by filtering D(7,5) and compare edge multisets."""
    k, q, r = UNBALANCED.k, UNBALANCED.q, UNBALANCED.r
    cd = CdGraph(UNBALANCED)
    coords = all_coordinates(k, q)
    full = DkqGraph(k, q).materialize()

    def members(side):
        ok = np.isin(coords[:, 0], UNBALANCED.selectors(side))
        ok &= ~batch_certificates(coords, side, q, r).any(axis=1)
        idx = np.flatnonzero(ok)
        lookup = {int(v): cd.vertex_to_index(side, DkqVertex(side, tuple(int(c) for c in coords[v]), q))
                  for v in idx}
        return lookup

    points, lines = members(POINT), members(LINE)
    edges = [(points[int(u)], lines[int(v)]) for u, v in full.edges if int(u) in points and int(v) in lines]
    expected = DenseBipartiteGraph(len(points), len(lines), edges)
    assert expected.same_edges(cd_7_5)


def test_neighbor_queries_are_consistent_and_cheap():
    G = CdGraph(UNBALANCED)
    rng = np.random.default_rng(3)
    for v in rng.integers(0, G.n_left, size=30):
        for slot in range(G.d_left):
            with count_field_ops() as ops:
                w = cd_neighbor(UNBALANCED, POINT, int(v), slot)
            assert ops[0] <= 50 * UNBALANCED.k ** 2
            back = G.slot_of(LINE, w, int(v))
            assert G.neighbor(LINE, w, back)[0] == int(v)


def test_oracle_is_shared_between_queries():
    oracle = cd_graph(UNBALANCED)
    assert oracle is cd_graph(CdParams(7, 5, (2, 1), (4, 3, 2, 1)))
    assert (oracle.d_left, oracle.d_right) == (4, 2)
    assert cd_neighbor(UNBALANCED, POINT, 0, 1) == oracle.neighbor(POINT, 0, 1)[0]
