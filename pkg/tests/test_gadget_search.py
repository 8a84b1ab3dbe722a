from __future__ import annotations

import math
import os

import numpy as np
import pytest

import gadget_search
from errors import GadgetSearchExhausted, ParameterError, SamplingBudgetExceeded
from gadget_search import (
    GadgetSpec,
    catalog_paths,
    check_gadget,
    gadget_name,
    load_or_search,
    sample_biregular,
    search_gadget,
    threshold,
)
from graph_io import checksum
from graphs import LEFT, RIGHT

PASSING = GadgetSpec(n1=24, n2=24, d1=6, d2=6, C=1.0, delta=0.8, t_exhaustive=3, max_attempts=1000, seed=7)
HALF_SLACK = GadgetSpec(n1=24, n2=24, d1=6, d2=6, C=1.0, delta=0.5, t_exhaustive=3, max_attempts=1000, seed=7)


def test_spec_is_validated():
    with pytest.raises(ParameterError):
        GadgetSpec(n1=10, n2=12, d1=3, d2=3)
    with pytest.raises(ParameterError):
        GadgetSpec(n1=4, n2=4, d1=5, d2=5)
    with pytest.raises(ParameterError):
        GadgetSpec(n1=12, n2=12, d1=3, d2=3, delta=1.0)
    with pytest.raises(ParameterError):
        GadgetSpec(n1=12, n2=12, d1=3, d2=3, threshold_mode="linear")


def test_size_range_and_threshold():
    spec = GadgetSpec(n1=24, n2=12, d1=3, d2=6, C=1.0, delta=0.5)
    assert spec.p == pytest.approx(0.25)
    assert spec.max_size(LEFT) == 4
    assert spec.max_size(RIGHT) == 4
    assert threshold(spec, LEFT, 2) == pytest.approx(0.5 * 3 * math.exp(-0.5))
    assert threshold(spec, RIGHT, 1) == pytest.approx(0.5 * 6 * math.exp(-0.25))


@pytest.mark.parametrize("n1,n2,d1,d2", [(12, 12, 3, 3), (24, 12, 2, 4), (6, 9, 3, 2), (24, 24, 6, 6)])
def test_samples_are_simple_and_biregular(n1, n2, d1, d2):
    rng = np.random.default_rng(0)
    for _ in range(5):
        H = sample_biregular(n1, n2, d1, d2, rng)
        assert H.is_biregular(d1, d2)
        assert H.multiplicity_free()


def test_sampling_is_deterministic():
    a = sample_biregular(12, 12, 3, 3, np.random.default_rng(5))
    b = sample_biregular(12, 12, 3, 3, np.random.default_rng(5))
    assert checksum(a) == checksum(b)


def test_edge_inclusion_frequency():
    rng = np.random.default_rng(17)
    draws = 10_000
    hits = 0
    for _ in range(draws):
        H = sample_biregular(8, 8, 2, 2, rng)
        hits += int(any(u == 0 and v == 0 for u, v in H.edges.tolist()))
    sigma = math.sqrt(0.25 * 0.75 / draws)
    assert abs(hits / draws - 0.25) <= 3 * sigma


def test_sampling_budget():
    with pytest.raises(SamplingBudgetExceeded) as info:
        sample_biregular(1, 2, 4, 2, np.random.default_rng(0), max_tries=3)
    assert info.value.attempts == 3


@pytest.mark.slow
def test_search_finds_a_gadget_and_certificate_replays():
    H, cert = search_gadget(PASSING)
    assert cert.passed
    assert H.is_biregular(6, 6)
    assert H.name == gadget_name(PASSING)
    assert cert.p == pytest.approx(0.25)
    small = [s for s in cert.sizes if s["t"] <= 3]
    assert all(s["mode"] == "exhaustive" for s in small)
    assert {s["side"] for s in cert.sizes} == {"left", "right"}
    again = check_gadget(H, PASSING)
    assert again.to_dict() == cert.to_dict()


def test_unreachable_threshold_exhausts_with_best_certificate():
    spec = GadgetSpec(n1=24, n2=24, d1=6, d2=6, C=1.0, delta=0.05, max_attempts=3, seed=1)
    with pytest.raises(GadgetSearchExhausted) as info:
        search_gadget(spec)
    best = info.value.best
    assert best is not None and not best.passed
    assert best.margin() < 1


def test_check_rejects_wrong_shape():
    H = sample_biregular(12, 12, 3, 3, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        check_gadget(H, GadgetSpec(n1=12, n2=12, d1=4, d2=4))


def test_catalog_round_trip(catalog):
    spec = GadgetSpec(n1=6, n2=6, d1=3, d2=3, delta=0.9, seed=2, max_attempts=200)
    H, cert, cached = load_or_search(spec)
    assert not cached
    graph_path, cert_path = catalog_paths(spec)
    assert os.path.dirname(graph_path) == catalog
    assert os.path.isfile(graph_path) and os.path.isfile(cert_path)
    H2, cert2, cached2 = load_or_search(spec)
    assert cached2
    assert checksum(H2) == checksum(H) == cert2.graph_checksum


def test_failed_draws_count_as_attempts(monkeypatch):
    calls = []

    def no_graph(n1, n2, d1, d2, rng, max_tries=10):
        calls.append(n1)
        raise SamplingBudgetExceeded("no graph", attempts=max_tries)

    monkeypatch.setattr(gadget_search, "sample_biregular", no_graph)
    with pytest.raises(GadgetSearchExhausted) as info:
        search_gadget(GadgetSpec(n1=12, n2=12, d1=3, d2=3, max_attempts=4))
    assert len(calls) == 4
    assert info.value.best is None


@pytest.mark.slow
def test_half_slack_search_reaches_the_unique_neighbor_checks():
    try:
        H, cert = search_gadget(HALF_SLACK)
    except GadgetSearchExhausted as e:
        cert = e.best
        assert cert is not None and not cert.passed
    else:
        assert cert.passed and H.is_biregular(6, 6)
        assert check_gadget(H, HALF_SLACK).to_dict() == cert.to_dict()
    assert [s["mode"] for s in cert.sizes if s["t"] <= 3] == ["exhaustive"] * 6
    assert max(s["t"] for s in cert.sizes) == 4
