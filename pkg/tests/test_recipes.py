from __future__ import annotations

import json

import pytest

from construct import write_artifact
from errors import ParameterError, RecipeError
from graph_io import write_graph
from graphs import DenseBipartiteGraph
from recipes import RECIPE_KINDS, Recipe, build, default_audits, named_graph


def _kinds(suite, role):
    return [spec["kind"] for artifact, spec in suite if artifact.role == role]


# ── Recipe parsing ─────────────────────────────────────────────────────────

def test_flat_and_nested_parameters_are_equivalent():
    flat = Recipe.from_dict({"kind": "lps", "p": 5, "q": 13, "seed": 4})
    nested = Recipe.from_dict({"kind": "lps", "params": {"p": 5, "q": 13}, "seed": 4})
    assert flat == nested
    assert flat.to_dict() == {"kind": "lps", "seed": 4, "params": {"p": 5, "q": 13}}


@pytest.mark.parametrize("raw", [
    {"kind": "zig-zag"},
    {"kind": "lps", "seed": -1},
    {"kind": "lps", "seed": 2**64},
    {"kind": "lps", "seed": "7"},
    {"kind": "lps", "params": {"p": 5}, "q": 13},
    ["lps"],
])
def test_invalid_recipes(raw):
    with pytest.raises(ParameterError):
        Recipe.from_dict(raw)


def test_unreadable_recipe_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParameterError):
        Recipe.load(str(path))
    with pytest.raises(ParameterError):
        Recipe.load(str(tmp_path / "missing.json"))


def test_every_kind_has_a_builder():
    assert len(RECIPE_KINDS) == 9
    assert {"composite-cd", "composite-lossless", "composite-incidence"} <= set(RECIPE_KINDS)


def test_named_graphs():
    assert named_graph("petersen").number_of_edges() == 15
    assert named_graph("complete:5").number_of_nodes() == 5
    assert named_graph("cycle:8").name == "cycle:8"
    with pytest.raises(ParameterError):
        named_graph("wheel:5")
    with pytest.raises(ParameterError):
        named_graph("complete:x")


# ── Single constructions ───────────────────────────────────────────────────

def test_cd_recipe_is_four_two_biregular():
    result = build(Recipe("cd", {"k": 7, "q": 5, "A": [1, 2], "B": [1, 2, 3, 4]}))
    product = result.product
    assert product.graph.is_biregular(4, 2)
    assert product.manifest["kind"] == "cd"
    assert product.manifest["d_left"] == 4 and product.manifest["d_right"] == 2
    assert product.manifest["recipe"]["params"]["B"] == [1, 2, 3, 4]
    assert result.factors == []


def test_composite_cd_takes_degrees():
    result = build(Recipe("composite-cd", {"k": 7, "q": 5, "d1": 2, "d2": 4}))
    assert result.product.graph.is_biregular(4, 2)
    assert result.product.manifest["kind"] == "composite-cd"
    assert result.notes


def test_unknown_parameters_are_rejected():
    with pytest.raises(ParameterError):
        build(Recipe("dkq", {"k": 5, "q": 3, "radius": 2}))
    with pytest.raises(ParameterError):
        build(Recipe("lps", {"q": 13}))


def test_invalid_construction_reports_its_stage():
    with pytest.raises(RecipeError) as info:
        build(Recipe("cd", {"k": 8, "q": 3, "A": [1], "B": [1]}))
    assert info.value.stage == "parameters"


def test_lps_recipe_searches_q():
    product = build(Recipe("lps", {"p": 5, "min_q": 10})).product
    assert product.manifest["q_searched"]
    assert product.graph.n_left == 1092
    suite = default_audits(build(Recipe("lps", {"p": 5, "q": 13})))
    assert _kinds(suite, "product") == ["biregular", "spectral", "girth"]


def test_edge_incidence_of_named_and_nested_bases():
    petersen = build(Recipe("edge-incidence", {"base": "petersen"}))
    assert petersen.product.graph.is_biregular(2, 3)
    assert petersen.factors == []
    nested = build(Recipe("edge-incidence", {"base": {"kind": "lps", "p": 5, "q": 13}}))
    assert nested.product.graph.is_biregular(2, 6)
    assert [a.role for a in nested.artifacts] == ["base", "product"]


def _write_gadget(tmp_path) -> str:
    path = str(tmp_path / "k33_minus_matching.txt")
    write_graph(DenseBipartiteGraph(3, 3, [(i, j) for i in range(3) for j in range(3) if i != j]), path)
    return path


def test_tripartite_recipe_from_factor_specs(tmp_path):
    recipe = Recipe("tripartite", {
        "g1": {"kind": "edge-incidence", "base": "complete:4"},
        "g2": {"kind": "edge-incidence", "base": "complete:4", "transpose": True},
        "gadget": {"file": _write_gadget(tmp_path)},
    }, seed=11)
    result = build(recipe)
    assert result.product.graph.is_biregular(4, 4)
    assert result.product.manifest["edge_identity"]
    assert [a.role for a in result.factors] == ["g1", "g2", "gadget"]
    suite = default_audits(result)
    assert _kinds(suite, "product") == ["biregular", "unique_neighbors", "unique_neighbors"]


def test_failing_nested_stage_keeps_finished_factors():
    recipe = Recipe("tripartite", {
        "g1": {"kind": "edge-incidence", "base": "complete:4"},
        "g2": {"kind": "edge-incidence", "base": "complete:4", "transpose": True},
        "gadget": {"kind": "gadget", "n1": 3, "n2": 3, "d1": 3, "d2": 3, "C": 2.0, "max_attempts": 2},
    })
    finished = []
    with pytest.raises(RecipeError) as info:
        build(recipe, finished)
    assert info.value.stage == "gadget"
    assert [a.role for a in finished] == ["g1", "g2"]


# ── Gadgets and determinism ────────────────────────────────────────────────

GADGET = {"n1": 12, "n2": 12, "d1": 3, "d2": 3, "delta": 0.9, "max_attempts": 200}


def test_gadget_recipe_carries_its_certificate():
    product = build(Recipe("gadget", GADGET, seed=5)).product
    assert product.certificate["passed"]
    assert product.certificate["graph_checksum"] == product.checksum
    assert not product.manifest["from_catalog"]


def test_gadget_catalog_is_used_on_the_second_build(catalog):
    first = build(Recipe("gadget", {**GADGET, "catalog": True}, seed=5)).product
    second = build(Recipe("gadget", {**GADGET, "catalog": True}, seed=5)).product
    assert not first.manifest["from_catalog"]
    assert second.manifest["from_catalog"]
    assert first.checksum == second.checksum


def test_rebuilding_gives_byte_identical_files(tmp_path):
    paths = []
    for run in ("a", "b"):
        product = build(Recipe("gadget", GADGET, seed=9)).product
        graph_path, manifest_path = write_artifact(product, str(tmp_path / run / "gadget"))
        paths.append((graph_path, manifest_path))
    (ga, ma), (gb, mb) = paths
    with open(ga, "rb") as a, open(gb, "rb") as b:
        assert a.read() == b.read()
    with open(ma, encoding="utf-8") as a, open(mb, encoding="utf-8") as b:
        assert json.load(a) == json.load(b)


def test_square_gadget_at_half_slack():
    params = {"n1": 6, "n2": 6, "d1": 3, "d2": 3, "C": 1.0, "delta": 0.5, "max_attempts": 1000}
    product = build(Recipe("gadget", params, seed=4)).product
    cert = product.certificate
    assert cert["passed"]
    assert [(s["side"], s["t"], s["mode"]) for s in cert["sizes"]] == [
        ("left", 1, "exhaustive"), ("left", 2, "exhaustive"),
        ("right", 1, "exhaustive"), ("right", 2, "exhaustive"),
    ]


def test_different_seeds_give_different_gadgets():
    a = build(Recipe("gadget", GADGET, seed=1)).product
    b = build(Recipe("gadget", GADGET, seed=2)).product
    assert a.checksum != b.checksum


# ── Composites ─────────────────────────────────────────────────────────────

@pytest.mark.slow
def test_composite_incidence():
    result = build(Recipe("composite-incidence", {"p_a": 5, "p_b": 5, "q": 13}, seed=3))
    product = result.product
    assert product.graph.is_biregular(6, 6)
    assert product.graph.n_edges == 39312
    assert product.manifest["edge_identity"]
    assert [a.role for a in result.factors] == ["lps_a", "lps_b", "incidence_a", "incidence_b", "gadget"]
    gadget = result.factors[-1]
    assert gadget.certificate["passed"]
    assert gadget.certificate["spec"]["delta"] == 0.5
    suite = default_audits(result)
    assert _kinds(suite, "lps_a") == ["biregular", "spectral", "girth"]
    assert _kinds(suite, "product").count("unique_neighbors") == 2


@pytest.mark.slow
def test_composite_lossless_marks_the_substituted_factor():
    result = build(Recipe("composite-lossless", {}, seed=0))
    product = result.product
    assert product.manifest["substituted_bicycle_free_factor"]
    assert product.manifest["notes"]
    lps, random_factor, gadget = result.factors
    big_d = lps.graph.d_right
    assert big_d == 6
    assert random_factor.manifest["kind"] == "random-biregular"
    assert random_factor.graph.is_biregular(big_d, 3)
    assert (gadget.graph.n_left, gadget.graph.n_right) == (big_d, big_d)
    assert gadget.graph.is_biregular(3, 3)
    assert gadget.certificate["passed"]
    assert gadget.certificate["spec"]["delta"] == 0.5
    assert product.graph.is_biregular(big_d * 3, 9)
    assert product.graph.d_left == big_d * gadget.graph.d_left
    assert product.graph.n_edges == lps.graph.n_right * gadget.graph.n_edges
    assert "bicycle_free" in _kinds(default_audits(result), "bicycle_free")
