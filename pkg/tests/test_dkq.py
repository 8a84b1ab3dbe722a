from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PROPERTY_SETTINGS
from dkq import (
    LINE,
    POINT,
    DkqGraph,
    DkqVertex,
    all_coordinates,
    batch_certificates,
    batch_neighbors,
    certificate,
    certificate_radius,
    component_census,
    coordinate_schema,
    dkq_neighbor,
    is_incident,
)
from errors import ParameterError
from field_arith import count_field_ops
from verification import girth


@st.composite
def vertices(draw: st.DrawFn) -> DkqVertex:
    k = draw(st.sampled_from([5, 6, 7, 9]))
    q = draw(st.sampled_from([3, 5, 7]))
    side = draw(st.sampled_from([POINT, LINE]))
    coords = tuple(draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k)))
    return DkqVertex(side, coords, q)


def test_schema_prefix():
    assert coordinate_schema(5) == ["1", "1,1", "1,2", "2,1", "2,2"]
    assert coordinate_schema(7)[5:] == ["2,2'", "2,3"]
    with pytest.raises(ParameterError):
        coordinate_schema(3)


def test_zero_vertex_maps_to_zero():
    u = DkqVertex(POINT, (0,) * 7, 3)
    assert dkq_neighbor(u, 0).coords == (0,) * 7


@PROPERTY_SETTINGS
@given(vertices(), st.integers(0, 6))
def test_neighbor_relation_is_symmetric(u, t):
    v = dkq_neighbor(u, t)
    assert v.side != u.side
    assert v.coords[0] == t % u.q
    assert dkq_neighbor(v, u.coords[0]) == u
    point, line = (u, v) if u.side == POINT else (v, u)
    assert is_incident(point, line)


@PROPERTY_SETTINGS
@given(vertices())
def test_index_round_trip(u):
    assert DkqVertex.from_index(u.side, u.index(), u.k, u.q) == u


@pytest.mark.parametrize("k,q", [(5, 3), (5, 5), (7, 3)])
def test_materialized_graph_is_regular_with_large_girth(k, q):
    G = DkqGraph(k, q).materialize()
    assert (G.n_left, G.n_right) == (q ** k, q ** k)
    assert G.is_biregular(q, q)
    assert G.multiplicity_free()
    assert girth(G) >= k + 4


def test_oracle_agrees_with_materialized_graph():
    oracle = DkqGraph(5, 3)
    G = oracle.materialize()
    rng = np.random.default_rng(0)
    for v in rng.integers(0, G.n_left, size=40):
        for side in (POINT, LINE):
            got = sorted(oracle.neighbor(side, int(v), s)[0] for s in range(3))
            assert got == sorted(G.neighbors(side, int(v)).tolist())


def test_oracle_co_slot_points_back():
    oracle = DkqGraph(7, 5)
    for v in (0, 17, 4242, 5 ** 7 - 1):
        for slot in range(5):
            w, back = oracle.neighbor(POINT, v, slot)
            assert oracle.neighbor(LINE, w, back) == (v, slot)
            assert oracle.slot_of(LINE, w, v) == back


def test_certificates_are_constant_along_edges():
    k, q = 7, 3
    r = certificate_radius(k)
    rng = np.random.default_rng(1)
    points = all_coordinates(k, q)[rng.integers(0, q ** k, size=10_000)]
    slots = rng.integers(0, q, size=10_000)
    lines = batch_neighbors(points, slots, POINT, q)
    assert np.array_equal(batch_certificates(points, POINT, q, r), batch_certificates(lines, LINE, q, r))


def test_partner_index_runs_with_the_entry_degree():
    k, q = 10, 3
    r = certificate_radius(k)
    assert r == 3
    rng = np.random.default_rng(4)
    points = all_coordinates(k, q)[rng.integers(0, q ** k, size=5_000)]
    slots = rng.integers(0, q, size=5_000)
    lines = batch_neighbors(points, slots, POINT, q)
    assert np.array_equal(batch_certificates(points, POINT, q, r), batch_certificates(lines, LINE, q, r))
    for point, line in zip(points[:20], lines[:20]):
        a = certificate(DkqVertex(POINT, tuple(int(c) for c in point), q), r)
        b = certificate(DkqVertex(LINE, tuple(int(c) for c in line), q), r)
        assert a.entries == b.entries


def test_scalar_and_batch_certificates_agree():
    k, q = 9, 5
    r = certificate_radius(k)
    rng = np.random.default_rng(2)
    coords = all_coordinates(k, q)[rng.integers(0, q ** k, size=50)]
    batch = batch_certificates(coords, LINE, q, r)
    for row, expected in zip(coords, batch):
        cert = certificate(DkqVertex(LINE, tuple(int(c) for c in row), q), r)
        assert list(cert.entries) == expected.tolist()


def test_certificate_radius_is_checked():
    u = DkqVertex(POINT, (0,) * 7, 3)
    assert certificate(u, 2).is_zero()
    with pytest.raises(ParameterError):
        certificate(u, 3)


def test_components_match_certificate_classes():
    census = component_census(7, 3)
    assert census["components"] == 3 == census["expected"]
    assert census["classes_are_components"]
    assert census["sizes"] == [(729, 729)] * 3


def test_neighbor_query_cost_is_linear_in_k():
    u = DkqVertex(POINT, tuple(range(9)), 11)
    with count_field_ops() as ops:
        dkq_neighbor(u, 4)
    assert 0 < ops[0] <= 2 * 9
