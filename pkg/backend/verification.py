# -*- coding: utf-8 -*-
"""
verification.py - Combinatorial audits: girth, bicycle-freeness, unique
neighbors, subset expansion, simple-path counts and bidegrees.

Every audit returns an AuditReport that serializes to JSON. A failing
report always carries a witness (a vertex set, or a vertex) that has been
replayed independently before it is reported.

Usage:
    report = expansion_audit(G, "left", params=ExpansionParams(epsilon=0.5, d_prime=1.5))
    print(report.passed, report.sizes)
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from errors import ParameterError, PathCountTooLarge, PreconditionError
from graph_io import checksum
from graphs import LEFT, RIGHT, SIDE_NAMES, DenseBipartiteGraph, ExplicitBipartiteGraph, FlatGraph, flatten, parse_side
from subset_scan import _EXHAUSTIVE_BUDGET, _SAMPLES_PER_SIZE, recount, scan_size, stage_rng

_PATH_LIMIT = 10**8  # refuse path enumerations estimated above this
_ROOT_BATCH = 256  # BFS roots advanced together in girth()
_BALL_CELLS = 4_000_000  # ball-membership cells per batch in is_bicycle_free()
_STAGE_AUDIT = 2
_TOL = 1e-9

Infinite = math.inf


# ── Reports ────────────────────────────────────────────────────────────────

@dataclass
class AuditReport:
    """Outcome of one audit on one graph."""

    kind: str
    graph: str
    checksum: str | None
    params: dict = field(default_factory=dict)
    sizes: list[dict] = field(default_factory=list)
    mode: str = "exact"
    passed: bool = True
    wall_time: float = 0.0
    witness: list[int] | int | None = None
    value: float | int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        out = asdict(self)
        if isinstance(out["value"], float) and math.isinf(out["value"]):
            out["value"] = "inf"
        return out


def _graph_identity(G) -> tuple[str, str | None]:
    if isinstance(G, DenseBipartiteGraph):
        return G.name, checksum(G)
    return getattr(G, "name", "") or type(G).__name__, None


def _edge_endpoints(flat: FlatGraph) -> np.ndarray:
    """(m, 2) endpoints of every edge id of a flat graph."""
    src = np.repeat(np.arange(flat.n), np.diff(flat.indptr))
    order = np.argsort(flat.eid, kind="stable")
    return src[order].reshape(flat.n_edges, 2)


def _flat_adjacency(flat: FlatGraph) -> sparse.csr_matrix:
    data = np.ones(len(flat.nbr), dtype=np.float64)
    A = sparse.csr_matrix((data, flat.nbr, flat.indptr), shape=(flat.n, flat.n))
    A.sum_duplicates()
    return A


# ── Girth ──────────────────────────────────────────────────────────────────

def girth(G: DenseBipartiteGraph | nx.Graph) -> int | float:
    """Length of the shortest cycle, or Infinite for a forest.

    Level-synchronous BFS from a batch of roots at a time. From a root,
    the first level holding a vertex reached along two distinct shortest
    paths closes an even cycle of length 2*level, and an edge inside a
    level closes an odd one of length 2*level + 1. Minimizing over roots
    gives the exact girth. Parallel edges count as a 2-cycle. Bipartite
    inputs only need left roots, since every cycle visits the left side.
    """
    flat = flatten(G)
    if flat.n_edges == 0:
        return Infinite
    A = _flat_adjacency(flat)
    roots = np.arange(flat.n_left if flat.n_left is not None else flat.n)
    best: float = Infinite
    for start in range(0, len(roots), _ROOT_BATCH):
        best = min(best, _girth_from_roots(A, roots[start:start + _ROOT_BATCH], best))
        if best == 2:
            break
    return int(best) if best < Infinite else Infinite


def _girth_from_roots(A: sparse.csr_matrix, roots: np.ndarray, best: float) -> float:
    n = A.shape[0]
    rows = np.arange(len(roots))
    visited = np.zeros((len(roots), n), dtype=bool)
    visited[rows, roots] = True
    paths = np.zeros((len(roots), n))
    paths[rows, roots] = 1.0
    level = 0
    while paths.any():
        if 2 * level + 1 >= best:
            return best
        frontier = (paths > 0).astype(np.float64)
        if level > 0 and ((A @ frontier.T).T * frontier).any():
            return 2 * level + 1
        reach = (A @ paths.T).T
        reach[visited] = 0.0
        level += 1
        if (reach >= 2).any():
            return min(best, 2 * level)
        paths = np.minimum(reach, 2.0)
        visited |= reach > 0
    return best


def shortest_cycle_by_dfs(G: DenseBipartiteGraph | nx.Graph, max_length: int | None = None) -> int | float:
    """Girth by explicit cycle enumeration, used to cross-check girth().

    Each cycle is found from its smallest vertex s by a DFS that only
    visits vertices above s and closes back to s along a different edge
    than the one it left by. Lengths at or above the best found so far
    are pruned.
    """
    flat = flatten(G)
    adj = [list(zip(flat.neighbors(v).tolist(), flat.edge_ids(v).tolist())) for v in range(flat.n)]
    best = (max_length + 1) if max_length is not None else Infinite
    on_path = [False] * flat.n

    def walk(s: int, v: int, first_edge: int, depth: int) -> None:
        nonlocal best
        for w, e in adj[v]:
            if w == s and e != first_edge and depth >= 1:
                best = min(best, depth + 1)
            elif w > s and not on_path[w] and depth + 2 < best:
                on_path[w] = True
                walk(s, w, first_edge, depth + 1)
                on_path[w] = False

    for s in range(flat.n):
        on_path[s] = True
        for w, e in adj[s]:
            if w > s and best > 2:
                on_path[w] = True
                walk(s, w, e, 1)
                on_path[w] = False
        on_path[s] = False
    if max_length is not None and best > max_length:
        return Infinite
    return int(best) if best < Infinite else Infinite


# ── Bicycle-freeness ───────────────────────────────────────────────────────

def is_bicycle_free(G: DenseBipartiteGraph | nx.Graph, r: int) -> tuple[bool, dict | None]:
    """Check that every radius-r ball induces at most one cycle.

    A ball is connected, so it holds at most one cycle exactly when its
    induced edge count is at most its vertex count.

    Returns:
        (True, None), or (False, witness) for the first violating center,
        with the ball's vertex and edge counts.
    """
    if r < 0:
        raise ParameterError(f"radius must be non-negative, got {r}")
    flat = flatten(G)
    if flat.n == 0 or flat.n_edges == 0:
        return True, None
    A = _flat_adjacency(flat)
    ends = _edge_endpoints(flat)
    batch = max(1, _BALL_CELLS // max(flat.n, flat.n_edges))
    for start in range(0, flat.n, batch):
        centers = np.arange(start, min(flat.n, start + batch))
        dist = csgraph.dijkstra(A, directed=False, indices=centers, unweighted=True, limit=r + 0.5)
        ball = dist <= r
        n_vertices = ball.sum(axis=1)
        n_edges = (ball[:, ends[:, 0]] & ball[:, ends[:, 1]]).sum(axis=1)
        bad = np.flatnonzero(n_edges > n_vertices)
        if len(bad):
            i = int(bad[0])
            return False, {
                "center": int(centers[i]),
                "radius": r,
                "vertices": int(n_vertices[i]),
                "edges": int(n_edges[i]),
            }
    return True, None


# ── Unique neighbors ───────────────────────────────────────────────────────

def unique_neighbors(G: ExplicitBipartiteGraph | nx.Graph, S: Iterable, side: int | str = LEFT) -> set:
    """Vertices outside S joined to S by exactly one edge.

    For a bipartite graph S lies on ``side`` and the result on the other
    side. For a networkx graph S is any vertex set; parallel edges of a
    MultiGraph are counted separately.
    """
    members = set(S)
    hits: Counter = Counter()
    if isinstance(G, nx.Graph):
        for s in members:
            for _, v in G.edges(s):
                if v != s:
                    hits[v] += 1
        return {v for v, c in hits.items() if c == 1 and v not in members}
    side = parse_side(side)
    if isinstance(G, DenseBipartiteGraph):
        for s in members:
            hits.update(G.neighbors(side, s).tolist())
    else:
        for s in members:
            hits.update(G.neighbor(side, s, slot)[0] for slot in range(G.degree(side) or 0))
    return {v for v, c in hits.items() if c == 1}


# ── Expansion audit ────────────────────────────────────────────────────────

@dataclass
class ExpansionParams:
    """Thresholds for expansion_audit; unset values are derived from the graph."""

    epsilon: float | None = None
    d: float | None = None
    d_prime: float | None = None
    delta: float | None = None
    g: int | None = None
    bicycle_free_radius: int | None = None
    min_count: int | None = None

    @classmethod
    def from_dict(cls, raw: dict | None) -> ExpansionParams:
        raw = dict(raw or {})
        known = {k: raw.pop(k) for k in list(raw) if k in cls.__dataclass_fields__}
        if raw:
            raise ParameterError(f"unknown expansion parameters: {sorted(raw)}")
        return cls(**known)


def expansion_size_bounds(epsilon: float, d: float, d_prime: float, g: float, variant: str = "girth") -> dict:
    """Largest |S| covered by the girth (or bicycle-free) expansion guarantee.

    ``proven`` is delta * g * d'^k with delta = (eps*d/d' - 1)/5 and
    k = floor(g/4) (floor(g/2) for the bicycle-free variant). ``derived``
    is the sharper value the counting argument gives directly:
    2(eps*d/d' - 1) k d'^k for girth, (eps*d/d' - 1) k d'^k for bicycle-free.

    Raises:
        PreconditionError: unless 1 < d' < eps*d.
    """
    if not 1 < d_prime < epsilon * d:
        raise PreconditionError(f"need 1 < d' < eps*d, got d'={d_prime}, eps*d={epsilon * d:g}")
    ratio = epsilon * d / d_prime - 1
    if math.isinf(g):
        return {"variant": variant, "g": "inf", "k": "inf", "delta": ratio / 5, "proven": math.inf, "derived": math.inf}
    k = int(g) // 4 if variant == "girth" else int(g) // 2
    proven = ratio / 5 * g * d_prime ** k
    derived = (2 if variant == "girth" else 1) * ratio * k * d_prime ** k
    return {"variant": variant, "g": g, "k": k, "delta": ratio / 5, "proven": proven, "derived": derived}


def expansion_audit(
    G: DenseBipartiteGraph,
    side: int | str = LEFT,
    size_bound: int | None = None,
    threshold_kind: str = "neighbor-ratio",
    params: ExpansionParams | dict | None = None,
    *,
    seed: int = 0,
    budget: int = _EXHAUSTIVE_BUDGET,
    samples: int = _SAMPLES_PER_SIZE,
    exhaustive_limit: int | None = None,
    workers: int | None = None,
) -> AuditReport:
    """Check every subset S of one side with |S| <= size_bound.

    neighbor-ratio requires |N(S)| >= (1 - eps) d |S|; on a side where every
    vertex has degree d it also checks |UN(S)| >= (1 - 2 eps) d |S| on each
    examined set. unique-neighbor-ratio requires |UN(S)| >= delta d |S|, and
    unique-neighbor-count requires |UN(S)| >= min_count.
    Without size_bound the bound comes from expansion_size_bounds(), with
    g = girth - 1 or the given bicycle-free radius.

    Raises:
        ParameterError: on a missing threshold parameter or unknown kind.
        PreconditionError: if d' is outside (1, eps*d) or the graph is not
            bicycle-free at the given radius.
    """
    started = time.perf_counter()
    side = parse_side(side)
    params = params if isinstance(params, ExpansionParams) else ExpansionParams.from_dict(params)
    name, digest = _graph_identity(G)
    n_side = G.size(side)
    notes: list[str] = []

    regular = G.degree(side)
    d = params.d if params.d is not None else regular
    if d is None:
        d = G.n_edges / max(n_side, 1)
        notes.append(f"{SIDE_NAMES[side]} side is irregular; using average degree {d:g}")

    if threshold_kind == "neighbor-ratio":
        if params.epsilon is None:
            raise ParameterError("neighbor-ratio audit needs epsilon")
        eps = params.epsilon
        check_implication = regular is not None and regular == d
        need_n, need_un = (1 - eps) * d, (1 - 2 * eps) * d

        def predicate(n, un, t):
            ok = n >= need_n * t - _TOL
            if check_implication:
                ok &= un >= need_un * t - _TOL
            return ok
        ratio_attr, threshold_ratio = "min_neighbors", need_n
    elif threshold_kind == "unique-neighbor-ratio":
        if params.delta is None:
            raise ParameterError("unique-neighbor-ratio audit needs delta")
        need_un = params.delta * d

        def predicate(n, un, t):
            return un >= need_un * t - _TOL
        ratio_attr, threshold_ratio = "min_unique", need_un
    elif threshold_kind == "unique-neighbor-count":
        if params.min_count is None:
            raise ParameterError("unique-neighbor-count audit needs min_count")
        need_count = params.min_count

        def predicate(n, un, t):
            return un >= need_count
        ratio_attr, threshold_ratio = "min_unique", None
    else:
        raise ParameterError(f"unknown threshold kind: {threshold_kind!r}")

    bounds = None
    if params.epsilon is not None and params.d_prime is not None:
        if params.bicycle_free_radius is not None:
            ok, witness = is_bicycle_free(G, params.bicycle_free_radius)
            if not ok:
                raise PreconditionError(f"{name} is not {params.bicycle_free_radius}-bicycle-free: {witness}")
            bounds = expansion_size_bounds(params.epsilon, d, params.d_prime, params.bicycle_free_radius, "bicycle")
        else:
            g = params.g if params.g is not None else girth(G) - 1
            bounds = expansion_size_bounds(params.epsilon, d, params.d_prime, g, "girth")
    if size_bound is None:
        if bounds is None:
            raise ParameterError("give size_bound, or epsilon and d_prime to derive it")
        size_bound = n_side if math.isinf(bounds["proven"]) else math.floor(bounds["proven"] + _TOL)
    size_bound = min(int(size_bound), n_side)

    report = AuditReport(
        kind=threshold_kind,
        graph=name,
        checksum=digest,
        params={
            "side": SIDE_NAMES[side],
            "d": d,
            "epsilon": params.epsilon,
            "d_prime": params.d_prime,
            "delta": params.delta,
            "size_bound": size_bound,
            "bounds": bounds,
            "seed": seed,
        },
        notes=notes,
    )
    if size_bound < 1:
        report.notes.append("size bound is below 1; nothing to check")
    table = G.neighbor_matrix(side)
    modes = set()
    for t in range(1, size_bound + 1):
        scan = scan_size(
            table, t, lambda n, un, t=t: predicate(n, un, t),
            rng=stage_rng(seed, _STAGE_AUDIT, side, t),
            budget=budget, samples=samples, exhaustive_limit=exhaustive_limit, workers=workers,
        )
        modes.add(scan.mode)
        if scan.failure_witness is not None:
            n, un = recount(table, scan.failure_witness)
            if predicate(np.array([n]), np.array([un]), t)[0]:
                raise AssertionError(f"failure witness {scan.failure_witness} does not re-fail")
            if report.witness is None:
                report.witness = scan.failure_witness
        worst = getattr(scan, ratio_attr)
        report.sizes.append({
            "t": t,
            "mode": scan.mode,
            "examined": scan.examined,
            "threshold_ratio": threshold_ratio,
            "worst_ratio": (worst or 0) / t,
            "worst_unique_ratio": (scan.min_unique or 0) / t,
            "failures": scan.failures,
            "witness": scan.failure_witness,
        })
        report.passed = report.passed and scan.passed
    report.mode = modes.pop() if len(modes) == 1 else ("mixed" if modes else "exhaustive")
    report.wall_time = time.perf_counter() - started
    return report


# ── Simple paths ───────────────────────────────────────────────────────────

def estimate_lr_paths(G: DenseBipartiteGraph, length: int) -> float:
    """Upper estimate of the number of L-L simple paths of the given length."""
    k = length // 2
    c = int(G.degrees(LEFT).max(initial=0))
    d = int(G.degrees(RIGHT).max(initial=0))
    if c == 0 or d == 0:
        return 0.0
    return G.n_left * c * (d - 1) * float(max(c - 1, 0) * (d - 1)) ** (k - 1) / 2


def count_lr_simple_paths(G: DenseBipartiteGraph, length: int, limit: float = _PATH_LIMIT) -> int:
    """Number of simple paths with exactly ``length`` edges and both ends in L.

    Each undirected path is counted once. Parallel edges give distinct paths.

    Raises:
        ParameterError: if length is not a positive even number.
        PathCountTooLarge: if estimate_lr_paths() exceeds limit.
    """
    if length < 2 or length % 2:
        raise ParameterError(f"path length must be even and at least 2, got {length}")
    estimate = estimate_lr_paths(G, length)
    if estimate > limit:
        raise PathCountTooLarge(f"about {estimate:.3g} paths of length {length}; limit is {limit:.3g}", estimate)
    flat = flatten(G)
    adj = [flat.neighbors(v).tolist() for v in range(flat.n)]
    on_path = [False] * flat.n

    def walk(v: int, remaining: int) -> int:
        if remaining == 0:
            return 1
        total = 0
        for w in adj[v]:
            if not on_path[w]:
                on_path[w] = True
                total += walk(w, remaining - 1)
                on_path[w] = False
        return total

    ends = 0
    for root in range(G.n_left):
        on_path[root] = True
        ends += walk(root, length)
        on_path[root] = False
    return ends // 2


def count_lr_simple_paths_bicycle_variant(G: DenseBipartiteGraph, length: int, limit: float = _PATH_LIMIT) -> int:
    return count_lr_simple_paths(G, length, limit)


def path_count_audit(
    G: DenseBipartiteGraph,
    variant: str = "girth",
    g: int | None = None,
    max_k: int | None = None,
    limit: float = _PATH_LIMIT,
) -> AuditReport:
    """Compare L-L path counts with the path-counting lower bounds.

    girth: with girth >= g + 1 (g defaults to girth - 1), every
    k <= floor(g/4) has at least k(m - n + 1) paths of length 2k.
    bicycle: with G g-bicycle-free, every k <= floor(g/2) has at least
    k(m - n) of them.
    """
    started = time.perf_counter()
    name, digest = _graph_identity(G)
    m, n = G.n_edges, G.n_vertices
    notes: list[str] = []
    if variant == "girth":
        measured = girth(G)
        g = g if g is not None else (measured - 1 if measured < Infinite else None)
        if g is not None and measured < Infinite and measured < g + 1:
            raise PreconditionError(f"girth {measured} is below g + 1 = {g + 1}")
        if g is None:
            notes.append("graph is a forest; the bound k(m-n+1) is non-positive for every k")
        top = g // 4 if g is not None else (max_k or 2)
        slack = 1
    elif variant == "bicycle":
        if g is None:
            raise ParameterError("bicycle variant needs the radius g")
        ok, witness = is_bicycle_free(G, g)
        if not ok:
            raise PreconditionError(f"{name} is not {g}-bicycle-free: {witness}")
        top = g // 2
        slack = 0
    else:
        raise ParameterError(f"unknown path-count variant: {variant!r}")
    if max_k is not None:
        top = min(top, max_k)

    report = AuditReport(kind=f"paths-{variant}", graph=name, checksum=digest,
                         params={"g": g, "m": m, "n": n, "max_k": top}, notes=notes)
    for k in range(1, top + 1):
        count = count_lr_simple_paths(G, 2 * k, limit)
        bound = k * (m - n + slack)
        report.sizes.append({"k": k, "length": 2 * k, "count": count, "bound": bound, "passed": count >= bound})
        report.passed = report.passed and count >= bound
    if top < 1:
        report.notes.append("no k satisfies the path-counting range")
    report.wall_time = time.perf_counter() - started
    return report


# ── Bidegrees ──────────────────────────────────────────────────────────────

def biregularity_audit(G: DenseBipartiteGraph, c: int | None = None, d: int | None = None) -> AuditReport:
    """Check that every left vertex has degree c and every right vertex degree d.

    Without c or d, the side only has to be regular. The witness is the
    first left (or, failing that, right) vertex with an unexpected degree,
    as a combined index.
    """
    started = time.perf_counter()
    name, digest = _graph_identity(G)
    report = AuditReport(kind="biregular", graph=name, checksum=digest, params={"c": c, "d": d})
    for side, want in ((LEFT, c), (RIGHT, d)):
        deg = G.degrees(side)
        entry = {"side": SIDE_NAMES[side], "min": int(deg.min(initial=0)), "max": int(deg.max(initial=0))}
        target = want if want is not None else entry["min"]
        bad = np.flatnonzero(deg != target)
        entry["expected"] = target
        entry["passed"] = len(bad) == 0
        report.sizes.append(entry)
        if len(bad) and report.witness is None:
            report.witness = int(bad[0]) + (0 if side == LEFT else G.n_left)
        report.passed = report.passed and entry["passed"]
    report.value = [G.d_left, G.d_right]
    report.wall_time = time.perf_counter() - started
    return report


def girth_report(G: DenseBipartiteGraph | nx.Graph, minimum: int | None = None) -> AuditReport:
    """girth() as an AuditReport, passing when the girth is at least ``minimum``."""
    started = time.perf_counter()
    name, digest = _graph_identity(G)
    value = girth(G)
    report = AuditReport(kind="girth", graph=name, checksum=digest, params={"minimum": minimum}, value=value)
    report.passed = minimum is None or value >= minimum
    report.wall_time = time.perf_counter() - started
    return report


def bicycle_report(G: DenseBipartiteGraph | nx.Graph, r: int) -> AuditReport:
    started = time.perf_counter()
    name, digest = _graph_identity(G)
    ok, witness = is_bicycle_free(G, r)
    report = AuditReport(kind="bicycle_free", graph=name, checksum=digest, params={"radius": r},
                         passed=ok, value=ok)
    if witness is not None:
        report.witness = witness["center"]
        report.sizes.append(witness)
    report.wall_time = time.perf_counter() - started
    return report
