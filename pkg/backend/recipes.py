# -*- coding: utf-8 -*-
"""
recipes.py - Build graphs from JSON recipes.

A recipe names a construction and its parameters:

    {"kind": "cd", "k": 7, "q": 5, "A": [1, 2], "B": [1, 2, 3, 4], "seed": 0}

Parameters may also be nested under "params". Every random choice is
drawn from the recipe seed through sub_seed(seed, stage), so a recipe
always rebuilds byte-identical graphs.

Kinds:
    dkq, cd, lps, edge-incidence, tripartite, gadget,
    composite-cd         CD(k,q,[1,d1],[1,d2])
    composite-lossless   LPS (x) random bicycle-free biregular graph, via a gadget
    composite-incidence  incidence(LPS_a) (x) incidence(LPS_b)^T, via a gadget

build() returns every intermediate graph as an Artifact; each one has
passed its biregularity audit before it is handed back.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Callable, Iterator

import networkx as nx

from cd_graph import CdParams, cd_graph, cd_manifest
from dkq import DkqGraph
from errors import ForgeError, ParameterError, RecipeError
from gadget_search import GadgetSpec, load_or_search, sample_biregular, search_gadget
from graph_io import checksum, read_graph, read_json
from graphs import DenseBipartiteGraph
from lps import LpsGraph, LpsParams, find_lps_q
from subset_scan import stage_rng, sub_seed
from transforms import edge_vertex_incidence, tripartite_product
from verification import biregularity_audit, is_bicycle_free

RECIPE_KINDS = (
    "dkq",
    "cd",
    "lps",
    "edge-incidence",
    "tripartite",
    "gadget",
    "composite-cd",
    "composite-lossless",
    "composite-incidence",
)

_STAGE_G1 = 1
_STAGE_G2 = 2
_STAGE_GADGET = 3
_STAGE_RANDOM_FACTOR = 4
_BICYCLE_TRIES = 50
_SEED_LIMIT = 2**64

# artifacts finished so far, kept for partial bundles
_FINISHED: ContextVar[list | None] = ContextVar("finished_artifacts", default=None)


@dataclass
class Recipe:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    output: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in RECIPE_KINDS:
            raise ParameterError(f"unknown recipe kind {self.kind!r}; expected one of {', '.join(RECIPE_KINDS)}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < _SEED_LIMIT:
            raise ParameterError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> Recipe:
        if not isinstance(raw, dict):
            raise ParameterError("a recipe must be a JSON object")
        body = dict(raw)
        kind = body.pop("kind", None)
        seed = body.pop("seed", 0)
        output = body.pop("output", None)
        params = body.pop("params", None)
        if params is None:
            params = body
        elif body:
            raise ParameterError(f"unexpected recipe keys next to 'params': {sorted(body)}")
        return cls(kind=kind, params=dict(params), seed=seed, output=output)

    @classmethod
    def load(cls, path: str) -> Recipe:
        try:
            raw = read_json(path)
        except (OSError, ValueError) as e:
            raise ParameterError(f"cannot read recipe {path}: {e}") from e
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed, "params": self.params}
        if self.output:
            out["output"] = self.output
        return out


@dataclass
class Artifact:
    """One graph produced while building a recipe."""

    role: str
    graph: DenseBipartiteGraph
    manifest: dict
    certificate: dict | None = None

    @property
    def checksum(self) -> str:
        return self.manifest["checksum"]


@dataclass
class BuildResult:
    recipe: Recipe
    product: Artifact
    factors: list[Artifact] = field(default_factory=list)

    @property
    def artifacts(self) -> list[Artifact]:
        return [*self.factors, self.product]

    @property
    def notes(self) -> list[str]:
        return self.product.manifest.get("notes", [])


# ── Helpers ────────────────────────────────────────────────────────────────

class _Params:
    """Read recipe parameters, rejecting unknown keys."""

    def __init__(self, kind: str, raw: dict) -> None:
        self.kind = kind
        self.raw = dict(raw)
        self.used: set[str] = set()

    def get(self, key: str, default=None, cast: Callable | None = None):
        self.used.add(key)
        if key not in self.raw:
            return default
        value = self.raw[key]
        if cast is None or value is None:
            return value
        try:
            return cast(value)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"{self.kind}: bad value for {key!r}: {value!r}") from e

    def require(self, key: str, cast: Callable | None = None):
        if key not in self.raw:
            raise ParameterError(f"{self.kind}: missing parameter {key!r}")
        return self.get(key, cast=cast)

    def done(self) -> None:
        extra = set(self.raw) - self.used
        if extra:
            raise ParameterError(f"{self.kind}: unknown parameters {sorted(extra)}")


@contextmanager
def _stage(kind: str, stage: str) -> Iterator[None]:
    try:
        yield
    except RecipeError:
        raise
    except ForgeError as e:
        raise RecipeError(f"{kind}/{stage}: {e}", kind, stage) from e


def _artifact(
    role: str,
    graph: DenseBipartiteGraph,
    manifest: dict,
    *,
    expect: tuple[int | None, int | None] = (None, None),
    certificate: dict | None = None,
) -> Artifact:
    """Audit bidegrees, then wrap the graph with its manifest."""
    audit = biregularity_audit(graph, *expect)
    if not audit.passed:
        raise RecipeError(
            f"{role}: {graph.name} failed its biregularity audit (witness vertex {audit.witness})", role, role
        )
    manifest = dict(manifest)
    manifest.update({
        "role": role,
        "name": graph.name,
        "n_left": graph.n_left,
        "n_right": graph.n_right,
        "n_edges": graph.n_edges,
        "d_left": graph.d_left,
        "d_right": graph.d_right,
        "checksum": checksum(graph),
    })
    manifest.setdefault("notes", [])
    artifact = Artifact(role, graph, manifest, certificate)
    finished = _FINISHED.get()
    if finished is not None:
        finished.append(artifact)
    return artifact


def named_graph(name: str) -> nx.Graph:
    """Small regular base graphs: petersen, complete:N, cycle:N."""
    label, _, arg = str(name).partition(":")
    label = label.strip().lower()
    try:
        if label == "petersen":
            G = nx.petersen_graph()
        elif label == "complete":
            G = nx.complete_graph(int(arg))
        elif label == "cycle":
            G = nx.cycle_graph(int(arg))
        else:
            raise ParameterError(f"unknown named graph {name!r}")
    except ValueError as e:
        raise ParameterError(f"bad named graph {name!r}") from e
    G.name = str(name)
    return G


def _factor(kind: str, spec, seed: int, stage: int, role: str) -> tuple[DenseBipartiteGraph, list[Artifact]]:
    """Resolve a factor given as {"file": path}, a nested recipe, or with "transpose"."""
    if not isinstance(spec, dict):
        raise ParameterError(f"{kind}: factor {role!r} must be an object")
    spec = dict(spec)
    transpose = bool(spec.pop("transpose", False))
    if "file" in spec:
        with _stage(kind, role):
            graph, _ = read_graph(spec.pop("file"))
        produced = [_artifact(role, graph, {"source": "file"})]
    else:
        nested = Recipe.from_dict({"seed": sub_seed(seed, stage), **spec})
        try:
            result = build(nested)
        except RecipeError as e:
            raise RecipeError(f"{kind}/{role}: {e}", kind, role) from e
        graph = result.product.graph
        produced = [*result.factors, _rename(result.product, role)]
    if transpose:
        graph = graph.transpose()
    return graph, produced


def _rename(artifact: Artifact, role: str) -> Artifact:
    manifest = dict(artifact.manifest, role=role)
    renamed = Artifact(role, artifact.graph, manifest, artifact.certificate)
    finished = _FINISHED.get()
    if finished is not None:
        finished[:] = [renamed if a is artifact else a for a in finished]
    return renamed


# ── Builders ───────────────────────────────────────────────────────────────

def _build_dkq(recipe: Recipe) -> BuildResult:
    p = _Params("dkq", recipe.params)
    k, q = p.require("k", int), p.require("q", int)
    p.get("audit")
    p.done()
    with _stage("dkq", "construct"):
        oracle = DkqGraph(k, q)
        graph = oracle.materialize()
    manifest = {"recipe": recipe.to_dict(), **oracle.describe()}
    return BuildResult(recipe, _artifact("product", graph, manifest, expect=(q, q)))


def _cd_params(kind: str, p: _Params) -> CdParams:
    k, q = p.require("k", int), p.require("q", int)
    if "d1" in p.raw or "d2" in p.raw:
        return CdParams.from_degrees(k, q, p.require("d1", int), p.require("d2", int))
    return CdParams(k, q, tuple(p.require("A", list)), tuple(p.require("B", list)))


def _build_cd(recipe: Recipe) -> BuildResult:
    p = _Params(recipe.kind, recipe.params)
    with _stage(recipe.kind, "parameters"):
        params = _cd_params(recipe.kind, p)
    p.get("audit")
    p.done()
    with _stage(recipe.kind, "construct"):
        graph = cd_graph(params).materialize()
    manifest = {"recipe": recipe.to_dict(), **cd_manifest(params), "kind": recipe.kind}
    if recipe.kind == "composite-cd":
        manifest["notes"] = [*manifest["notes"], f"A = [1, {len(params.A)}], B = [1, {len(params.B)}]"]
    product = _artifact("product", graph, manifest, expect=(len(params.B), len(params.A)))
    return BuildResult(recipe, product)


def _lps_artifact(kind: str, role: str, p_value: int, q_value: int | None, min_q: int | None) -> Artifact:
    with _stage(kind, role):
        searched = q_value is None
        if searched:
            q_value = find_lps_q(p_value, min_q or 2)
        oracle = LpsGraph(LpsParams.build(p_value, q_value))
        graph = oracle.materialize()
    manifest = oracle.describe()
    manifest["q_searched"] = searched
    return _artifact(role, graph, manifest, expect=(p_value + 1, p_value + 1))


def _build_lps(recipe: Recipe) -> BuildResult:
    p = _Params("lps", recipe.params)
    p_value = p.require("p", int)
    q_value = p.get("q", cast=int)
    min_q = p.get("min_q", cast=int)
    p.done()
    product = _lps_artifact("lps", "product", p_value, q_value, min_q)
    product.manifest["recipe"] = recipe.to_dict()
    return BuildResult(recipe, product)


def _build_edge_incidence(recipe: Recipe) -> BuildResult:
    p = _Params("edge-incidence", recipe.params)
    base_spec = p.require("base")
    p.done()
    factors: list[Artifact] = []
    if isinstance(base_spec, str):
        base = named_graph(base_spec)
        base_name = base.name
    else:
        base, factors = _factor("edge-incidence", base_spec, recipe.seed, _STAGE_G1, "base")
        base_name = base.name
    with _stage("edge-incidence", "incidence"):
        graph = edge_vertex_incidence(base, name=f"EV({base_name})")
    manifest = {"recipe": recipe.to_dict(), "kind": "edge-incidence", "base": base_name}
    return BuildResult(recipe, _artifact("product", graph, manifest, expect=(2, None)), factors)


def _build_tripartite(recipe: Recipe) -> BuildResult:
    p = _Params("tripartite", recipe.params)
    specs = {role: p.require(role) for role in ("g1", "g2", "gadget")}
    p.done()
    g1, f1 = _factor("tripartite", specs["g1"], recipe.seed, _STAGE_G1, "g1")
    g2, f2 = _factor("tripartite", specs["g2"], recipe.seed, _STAGE_G2, "g2")
    g0, f0 = _factor("tripartite", specs["gadget"], recipe.seed, _STAGE_GADGET, "gadget")
    with _stage("tripartite", "product"):
        graph = tripartite_product(g1, g2, g0)
    manifest = {"recipe": recipe.to_dict(), "kind": "tripartite", "factors": [g1.name, g2.name, g0.name],
                "n_middle": g1.n_right, "edge_identity": graph.n_edges == g1.n_right * g0.n_edges}
    return BuildResult(recipe, _artifact("product", graph, manifest), [*f1, *f2, *f0])


def _gadget_spec(kind: str, raw: dict, seed: int) -> GadgetSpec:
    fields = dict(raw)
    fields.setdefault("seed", seed)
    try:
        return GadgetSpec(**fields)
    except TypeError as e:
        raise ParameterError(f"{kind}: bad gadget parameters: {e}") from e


def _gadget_artifact(kind: str, role: str, spec: GadgetSpec, use_catalog: bool) -> Artifact:
    with _stage(kind, role):
        if use_catalog:
            graph, cert, cached = load_or_search(spec)
        else:
            (graph, cert), cached = search_gadget(spec), False
    manifest = {"kind": "gadget", "spec": spec.to_dict(), "from_catalog": cached}
    return _artifact(role, graph, manifest, expect=(spec.d1, spec.d2), certificate=cert.to_dict())


def _build_gadget(recipe: Recipe) -> BuildResult:
    raw = dict(recipe.params)
    use_catalog = bool(raw.pop("catalog", False))
    with _stage("gadget", "parameters"):
        spec = _gadget_spec("gadget", raw, recipe.seed)
    product = _gadget_artifact("gadget", "product", spec, use_catalog)
    product.manifest["recipe"] = recipe.to_dict()
    return BuildResult(recipe, product)


def _build_composite_lossless(recipe: Recipe) -> BuildResult:
    """LPS(p,q) on L x M, a random bicycle-free graph on M x R, a gadget at each w in M.

    Both factors meet M with degree D = p+1, so the gadget is a square
    D x D graph of degree d and the product is (D*d, right_degree*d)-biregular.
    """
    kind = recipe.kind
    p = _Params(kind, recipe.params)
    p_value = p.get("p", 5, int)
    q_value = p.get("q", 13, int)
    right_degree = p.get("right_degree", 3, int)
    d = p.get("gadget_degree", 3, int)
    radius = p.get("bicycle_radius", 1, int)
    gadget_raw = p.get("gadget", {}) or {}
    p.done()

    lps = _lps_artifact(kind, "lps", p_value, q_value, None)
    n_middle, big_d = lps.graph.n_right, lps.graph.d_right
    if (n_middle * big_d) % right_degree:
        raise RecipeError(f"{kind}: {n_middle}*{big_d} is not divisible by {right_degree}", kind, "random")
    n_right = n_middle * big_d // right_degree

    with _stage(kind, "random"):
        for attempt in range(_BICYCLE_TRIES):
            g2 = sample_biregular(n_middle, n_right, big_d, right_degree,
                                  stage_rng(recipe.seed, _STAGE_RANDOM_FACTOR, attempt))
            ok, _ = is_bicycle_free(g2, radius)
            if ok:
                break
        else:
            raise RecipeError(f"{kind}: no {radius}-bicycle-free sample in {_BICYCLE_TRIES} draws", kind, "random")
    g2.name = f"R({n_middle},{n_right},{big_d},{right_degree})"
    random_factor = _artifact("bicycle_free", g2, {
        "kind": "random-biregular",
        "bicycle_radius": radius,
        "attempt": attempt,
        "substituted": True,
    }, expect=(big_d, right_degree))

    gadget_fields = {"C": 1.0, "delta": 0.5, "t_exhaustive": 3, "max_attempts": 1000, **gadget_raw}
    with _stage(kind, "gadget"):
        spec = _gadget_spec(kind, {"n1": big_d, "n2": big_d, "d1": d, "d2": d, **gadget_fields},
                            sub_seed(recipe.seed, _STAGE_GADGET))
    gadget = _gadget_artifact(kind, "gadget", spec, False)

    with _stage(kind, "product"):
        graph = tripartite_product(lps.graph, g2, gadget.graph, name=f"TP({lps.graph.name},{g2.name})")
    manifest = {
        "recipe": recipe.to_dict(),
        "kind": kind,
        "n_middle": n_middle,
        "gadget_degrees": [d, d],
        "edge_identity": graph.n_edges == n_middle * gadget.graph.n_edges,
        "substituted_bicycle_free_factor": True,
        "notes": [
            "the near-Ramanujan bicycle-free base graph is replaced by a random "
            f"({big_d},{right_degree})-biregular graph checked {radius}-bicycle-free",
        ],
    }
    product = _artifact("product", graph, manifest, expect=(big_d * d, right_degree * d))
    return BuildResult(recipe, product, [lps, random_factor, gadget])


def _build_composite_incidence(recipe: Recipe) -> BuildResult:
    """incidence(LPS_a) on L x M, incidence(LPS_b) transposed on M x R, a gadget at each w in M."""
    kind = recipe.kind
    p = _Params(kind, recipe.params)
    p_a, q_a = p.get("p_a", 5, int), p.get("q_a", p.raw.get("q", 13), int)
    p_b, q_b = p.get("p_b", 5, int), p.get("q_b", p.raw.get("q", 13), int)
    p.get("q")
    d1 = p.get("gadget_degree", 3, int)
    gadget_raw = p.get("gadget", {}) or {}
    p.done()

    lps_a = _lps_artifact(kind, "lps_a", p_a, q_a, None)
    lps_b = _lps_artifact(kind, "lps_b", p_b, q_b, None)
    with _stage(kind, "incidence"):
        inc_a = edge_vertex_incidence(lps_a.graph, name=f"EV({lps_a.graph.name})")
        inc_b = edge_vertex_incidence(lps_b.graph, name=f"EV({lps_b.graph.name})").transpose(
            name=f"EV({lps_b.graph.name})^T")
    big_d1, big_d2 = p_a + 1, p_b + 1
    incidence_a = _artifact("incidence_a", inc_a, {"kind": "edge-incidence", "base": lps_a.graph.name},
                            expect=(2, big_d1))
    incidence_b = _artifact("incidence_b", inc_b, {"kind": "edge-incidence", "base": lps_b.graph.name,
                                                   "transposed": True}, expect=(big_d2, 2))
    if inc_a.n_right != inc_b.n_left:
        raise RecipeError(f"{kind}: middle sets differ ({inc_a.n_right} vs {inc_b.n_left})", kind, "incidence")
    if (big_d1 * d1) % big_d2:
        raise RecipeError(f"{kind}: gadget degrees do not balance on {big_d1}+{big_d2}", kind, "gadget")
    d2 = big_d1 * d1 // big_d2

    gadget_fields = {"C": 1.0, "delta": 0.5, "t_exhaustive": 3, "max_attempts": 1000, **gadget_raw}
    with _stage(kind, "gadget"):
        spec = _gadget_spec(kind, {"n1": big_d1, "n2": big_d2, "d1": d1, "d2": d2, **gadget_fields},
                            sub_seed(recipe.seed, _STAGE_GADGET))
    gadget = _gadget_artifact(kind, "gadget", spec, False)

    with _stage(kind, "product"):
        graph = tripartite_product(inc_a, inc_b, gadget.graph, name=f"TP({inc_a.name},{inc_b.name})")
    n_middle = inc_a.n_right
    manifest = {
        "recipe": recipe.to_dict(),
        "kind": kind,
        "n_middle": n_middle,
        "gadget_degrees": [d1, d2],
        "edge_identity": graph.n_edges == n_middle * gadget.graph.n_edges,
        "notes": [],
    }
    product = _artifact("product", graph, manifest, expect=(2 * d1, 2 * d2))
    return BuildResult(recipe, product, [lps_a, lps_b, incidence_a, incidence_b, gadget])


_BUILDERS: dict[str, Callable[[Recipe], BuildResult]] = {
    "dkq": _build_dkq,
    "cd": _build_cd,
    "lps": _build_lps,
    "edge-incidence": _build_edge_incidence,
    "tripartite": _build_tripartite,
    "gadget": _build_gadget,
    "composite-cd": _build_cd,
    "composite-lossless": _build_composite_lossless,
    "composite-incidence": _build_composite_incidence,
}


def build(recipe: Recipe, finished: list[Artifact] | None = None) -> BuildResult:
    """Construct the recipe's graph and every factor it depends on.

    Args:
        recipe: What to build.
        finished: If given, every audited artifact is appended as soon as
            it exists, so a failing build still leaves its earlier stages.

    Raises:
        ParameterError: for invalid parameters.
        RecipeError: when a stage fails; the cause is chained.
    """
    if finished is None:
        return _BUILDERS[recipe.kind](recipe)
    token = _FINISHED.set(finished)
    try:
        return _BUILDERS[recipe.kind](recipe)
    finally:
        _FINISHED.reset(token)


# ── Default audit suites ───────────────────────────────────────────────────

def default_audits(result: BuildResult) -> list[tuple[Artifact, dict]]:
    """(artifact, audit spec) pairs run by ``forge pipeline``.

    Every artifact gets a biregularity audit. LPS factors add their
    spectral bound 2 sqrt(p) and girth bound 4 log_p q. D(k,q) and CD
    products add girth >= k + 4, plus an expansion audit when the recipe
    carries an "audit" object with epsilon. Tripartite products get sampled
    unique-neighbor counts on both sides for sizes 1..4.
    """
    recipe = result.recipe
    product = result.product
    audits: list[tuple[Artifact, dict]] = [(a, {"kind": "biregular"}) for a in result.artifacts]
    for artifact in result.artifacts:
        manifest = artifact.manifest
        if manifest.get("kind") == "lps":
            audits.append((artifact, {"kind": "spectral", "bound": manifest["spectral_bound"]}))
            audits.append((artifact, {"kind": "girth", "minimum": _even_ceil(manifest["girth_lower_bound"])}))
        elif manifest.get("kind") == "random-biregular":
            audits.append((artifact, {"kind": "bicycle_free", "radius": manifest["bicycle_radius"]}))
    if recipe.kind in ("dkq", "cd", "composite-cd"):
        audits.append((product, {"kind": "girth", "minimum": product.manifest["k"] + 4}))
        extra = recipe.params.get("audit") or {}
        if "epsilon" in extra:
            audits.append((product, {"kind": "expansion", "side": "left", "threshold_kind": "neighbor-ratio",
                                     **extra}))
    if recipe.kind in ("composite-lossless", "composite-incidence", "tripartite"):
        for side in ("left", "right"):
            audits.append((product, {"kind": "unique_neighbors", "side": side, "max_size": 4,
                                     "min_count": 1, "mode": "sampled"}))
    return audits


def _even_ceil(x: float) -> int:
    """Smallest even integer >= x (bipartite girths are even)."""
    n = math.ceil(x - 1e-9)
    return n + (n % 2)
