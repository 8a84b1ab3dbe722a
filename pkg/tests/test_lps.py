from __future__ import annotations

import math

import pytest
from sympy import legendre_symbol

from errors import ParameterError
from graphs import LEFT, RIGHT
from lps import (
    LpsGraph,
    LpsParams,
    canonical,
    det,
    find_lps_q,
    four_square_solutions,
    lps_generators,
    mat_mul,
    validate_lps_pair,
)
from verification import girth


@pytest.fixture(scope="module")
def oracle() -> LpsGraph:
    return LpsGraph(LpsParams.build(5, 13))


@pytest.mark.parametrize("p,min_q", [(5, 10), (5, 100), (13, 10), (17, 50)])
def test_found_q_satisfies_the_congruences(p, min_q):
    q = find_lps_q(p, min_q)
    assert q >= min_q
    assert q % 4 == 1
    assert legendre_symbol(q % p, p) == -1
    validate_lps_pair(p, q)


def test_non_residue_by_enumeration_mod_13():
    q = find_lps_q(13, 10)
    squares = {x * x % 13 for x in range(1, 13)}
    assert q % 13 not in squares


@pytest.mark.parametrize("p,q", [(7, 13), (5, 29), (5, 5), (5, 9), (13, 17)])
def test_invalid_pairs_rejected(p, q):
    with pytest.raises(ParameterError):
        validate_lps_pair(p, q)


def test_four_squares_for_five():
    assert sorted(four_square_solutions(5)) == sorted([
        (1, 2, 0, 0), (1, -2, 0, 0), (1, 0, 2, 0), (1, 0, -2, 0), (1, 0, 0, 2), (1, 0, 0, -2),
    ])


def test_generators_are_closed_under_inversion():
    params = LpsParams.build(5, 13)
    gens = lps_generators(5, 13)
    assert len(gens) == 6 == len(set(gens))
    for s, g in enumerate(gens):
        inverse = params.generators[params.inverse_slot[s]]
        assert canonical(mat_mul(g, inverse, 13), 13) == (1, 0, 0, 1)
    assert params.trace["sqrt_minus_one"] ** 2 % 13 == 12


def test_canonical_form_is_idempotent():
    m = (3, 5, 7, 2)
    assert canonical(canonical(m, 13), 13) == canonical(m, 13)
    assert canonical(m, 13)[0] == 1


def test_every_generator_switches_sides():
    params = LpsParams.build(5, 13)
    for g in params.generators:
        assert legendre_symbol(det(g, 13), 13) == -1


def test_sizes_and_degrees(oracle, lps_5_13):
    assert oracle.n_left == oracle.n_right == 13 * 168 // 2 == 1092
    assert lps_5_13.is_biregular(6, 6)
    assert lps_5_13.multiplicity_free()


def test_neighbor_relation_is_symmetric_exhaustively(oracle):
    for v in range(oracle.n_left):
        for slot in range(oracle.d_left):
            w, back = oracle.neighbor(LEFT, v, slot)
            assert oracle.neighbor(RIGHT, w, back) == (v, slot)


def test_girth_and_connectivity(oracle, lps_5_13):
    bound = 4 * math.log(13) / math.log(5)
    measured = girth(lps_5_13)
    assert measured >= bound
    assert measured % 2 == 0 and measured >= 8
    assert oracle.is_connected()


def test_manifest_records_search_trace(oracle):
    info = oracle.describe()
    assert info["kind"] == "lps"
    assert info["spectral_bound"] == pytest.approx(2 * math.sqrt(5))
    assert set(info["search"]) >= {"primitive_root", "residue_class", "non_residue", "sqrt_minus_one"}
