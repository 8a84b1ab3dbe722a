# -*- coding: utf-8 -*-
"""
spectral.py - Second eigenvalues, subgraph density and Bethe-Hessian checks.

lambda2() reports the largest nontrivial eigenvalue magnitude. For a
bipartite graph the spectrum is symmetric, so both +top and -top are
trivial and the answer is the second singular value of the biadjacency
matrix. Small graphs use a dense eigendecomposition; large bipartite ones
use scipy's Lanczos (or plain power iteration) on B^T B with the top
singular vector deflated.

Usage:
    report = lambda2(lps_dense)
    report.lambda2 <= 2 * math.sqrt(5)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import networkx as nx
import numpy as np
from scipy import linalg, sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from errors import ConvergenceError, ParameterError, PreconditionError
from graphs import DenseBipartiteGraph
from subset_scan import stage_rng
from transforms import edge_vertex_incidence

_DENSE_LIMIT = 3000  # vertices; above this lambda2 goes iterative
_RESIDUAL_TOL = 1e-8
_PIVOT_TOL = 1e-12
_POWER_ITERATIONS = 50_000
_ZERO = 1e-9


@dataclass
class SpectralReport:
    """Top and second eigenvalue of a graph, with how they were obtained."""

    graph: str
    n_vertices: int
    top: float
    lambda2: float
    method: str
    residual: float
    bipartite: bool
    connected: bool
    signed_second: float | None = None
    ramanujan_bound: float | None = None
    bound: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ramanujan(self) -> bool | None:
        if self.ramanujan_bound is None:
            return None
        return self.lambda2 <= self.ramanujan_bound + 1e-9

    @property
    def passed(self) -> bool:
        return self.bound is None or self.lambda2 <= self.bound + 1e-6

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ramanujan"] = self.ramanujan
        out["passed"] = self.passed
        return out


# ── Second eigenvalue ──────────────────────────────────────────────────────

def _ramanujan_bound(G: DenseBipartiteGraph | nx.Graph) -> float | None:
    if isinstance(G, DenseBipartiteGraph):
        c, d = G.d_left, G.d_right
        if c and d:
            return math.sqrt(c - 1) + math.sqrt(d - 1)
        return None
    degrees = {deg for _, deg in G.degree()}
    if len(degrees) == 1:
        d = degrees.pop()
        return 2 * math.sqrt(d - 1) if d >= 1 else None
    return None


def lambda2(
    G: DenseBipartiteGraph | nx.Graph,
    method: str = "auto",
    tol: float = _RESIDUAL_TOL,
    bound: float | None = None,
    seed: int = 0,
) -> SpectralReport:
    """Nontrivial second eigenvalue magnitude.

    Args:
        G: A bipartite graph, or any networkx graph (dense path only).
        method: "auto", "dense", "eigsh" or "power".
        tol: Residual tolerance of the reported eigenpair.
        bound: Optional upper bound the report is checked against.
        seed: Start vector seed for the power method.

    Raises:
        ConvergenceError: if an iterative method stops above tol.
    """
    if method not in ("auto", "dense", "eigsh", "power"):
        raise ParameterError(f"unknown lambda2 method: {method!r}")
    if isinstance(G, nx.Graph):
        if method not in ("auto", "dense"):
            raise ParameterError("iterative lambda2 needs a bipartite graph")
        report = _dense_general(G)
    else:
        if method == "auto":
            method = "dense" if G.n_vertices <= _DENSE_LIMIT else "eigsh"
        if method == "dense":
            report = _dense_bipartite(G)
        else:
            report = _iterative_bipartite(G, method, tol, seed)
    scale = report.top ** 2 if report.method in ("eigsh", "power") else report.top
    if report.residual > tol * max(1.0, scale):
        raise ConvergenceError(f"{method} residual {report.residual:.2e} above tolerance", report.residual)
    report.bound = bound
    report.ramanujan_bound = _ramanujan_bound(G)
    if not report.connected:
        report.notes.append("graph is disconnected; lambda2 equals the top eigenvalue of another component")
    return report


def _pair_residual(A: np.ndarray, vec: np.ndarray, val: float) -> float:
    return float(np.linalg.norm(A @ vec - val * vec))


def _dense_general(G: nx.Graph) -> SpectralReport:
    A = nx.to_numpy_array(G, nodelist=list(G.nodes), weight=None, multigraph_weight=sum)
    bipartite = nx.is_bipartite(G)
    w, v = linalg.eigh(A)
    keep = np.arange(1, len(w) - 1) if bipartite else np.arange(0, len(w) - 1)
    return _dense_report(getattr(G, "name", "") or "graph", A, w, v, keep, bipartite,
                         len(G) > 0 and nx.is_connected(G))


def _dense_bipartite(G: DenseBipartiteGraph) -> SpectralReport:
    A = G.adjacency().toarray()
    w, v = linalg.eigh(A)
    keep = np.arange(1, len(w) - 1)
    n_comp = csgraph.connected_components(G.adjacency(), directed=False, return_labels=False)
    return _dense_report(G.name, A, w, v, keep, True, n_comp == 1)


def _dense_report(name, A, w, v, keep, bipartite, connected) -> SpectralReport:
    n = len(w)
    if n == 0:
        return SpectralReport(name, 0, 0.0, 0.0, "dense", 0.0, bipartite, connected)
    top = float(w[-1])
    if len(keep) == 0:
        return SpectralReport(name, n, top, 0.0, "dense", _pair_residual(A, v[:, -1], top), bipartite, connected)
    i = int(keep[np.argmax(np.abs(w[keep]))])
    lam = abs(float(w[i]))
    return SpectralReport(
        graph=name,
        n_vertices=n,
        top=top,
        lambda2=lam if lam > _ZERO else 0.0,
        method="dense",
        residual=_pair_residual(A, v[:, i], float(w[i])),
        bipartite=bipartite,
        connected=connected,
        signed_second=float(w[-2]) if n > 1 else None,
    )


def _gram(G: DenseBipartiteGraph) -> sparse.csr_matrix:
    B = G.biadjacency()
    return (B.T @ B).tocsr() if G.n_right <= G.n_left else (B @ B.T).tocsr()


def _iterative_bipartite(G: DenseBipartiteGraph, method: str, tol: float, seed: int) -> SpectralReport:
    M = _gram(G)
    n = M.shape[0]
    connected = csgraph.connected_components(G.adjacency(), directed=False, return_labels=False) == 1
    if n < 2:
        top = math.sqrt(float(M[0, 0])) if n == 1 else 0.0
        return SpectralReport(G.name, G.n_vertices, top, 0.0, method, 0.0, True, connected)
    rng = stage_rng(seed, 3)
    if method == "eigsh":
        top_sq, top_vec = _eigsh_top(M, None, tol)
        second_sq, second_vec = _eigsh_top(M, top_vec, tol)
    else:
        top_sq, top_vec = _power_top(M, None, tol, rng)
        second_sq, second_vec = _power_top(M, top_vec, tol, rng)
    second_sq = max(second_sq, 0.0)
    image = M @ second_vec
    image -= top_vec * (top_vec @ image)
    residual = float(np.linalg.norm(image - second_sq * second_vec))
    return SpectralReport(
        graph=G.name,
        n_vertices=G.n_vertices,
        top=math.sqrt(max(top_sq, 0.0)),
        lambda2=math.sqrt(second_sq) if second_sq > _ZERO else 0.0,
        method=method,
        residual=residual,
        bipartite=True,
        connected=bool(connected),
    )


def _deflated(M: sparse.csr_matrix, vec: np.ndarray | None) -> LinearOperator:
    if vec is None:
        return LinearOperator(M.shape, matvec=lambda x: M @ x, dtype=np.float64)
    scale = float(vec @ (M @ vec))

    def matvec(x):
        x = np.ravel(x)
        return M @ x - scale * vec * (vec @ x)
    return LinearOperator(M.shape, matvec=matvec, dtype=np.float64)


def _eigsh_top(M: sparse.csr_matrix, deflate: np.ndarray | None, tol: float) -> tuple[float, np.ndarray]:
    try:
        vals, vecs = eigsh(_deflated(M, deflate), k=1, which="LA", tol=tol * 1e-2, maxiter=20 * M.shape[0])
    except ArpackNoConvergence as e:
        raise ConvergenceError(f"eigsh did not converge: {e}", residual=math.inf) from e
    return float(vals[0]), vecs[:, 0]


def _power_top(
    M: sparse.csr_matrix, deflate: np.ndarray | None, tol: float, rng: np.random.Generator
) -> tuple[float, np.ndarray]:
    """Power iteration on the PSD matrix M, orthogonal to ``deflate``."""
    x = rng.standard_normal(M.shape[0])
    residual = math.inf
    theta = 0.0
    for _ in range(_POWER_ITERATIONS):
        if deflate is not None:
            x -= deflate * (deflate @ x)
        norm = np.linalg.norm(x)
        if norm == 0:
            return 0.0, x
        x /= norm
        y = M @ x
        if deflate is not None:
            y -= deflate * (deflate @ y)
        theta = float(x @ y)
        residual = float(np.linalg.norm(y - theta * x))
        if residual <= tol * max(1.0, theta):
            return theta, x
        x = y
    raise ConvergenceError(f"power iteration stopped at residual {residual:.2e}", residual)


# ── Spectral transfer to incidence graphs ──────────────────────────────────

def incidence_transfer(G: DenseBipartiteGraph | nx.Graph, pairing: bool | None = None) -> dict:
    """Second eigenvalue of a d-regular graph against its edge-vertex incidence graph.

    The incidence graph's nontrivial second eigenvalue is sqrt(mu2 + d),
    with mu2 the signed second-largest eigenvalue of G, and every
    eigenvalue lam != -d of G gives the pair +-sqrt(lam + d). The pairing
    is compared on the full dense spectra, by default only when the
    incidence graph is small enough for the dense path.
    """
    if isinstance(G, DenseBipartiteGraph):
        if G.d_left is None or G.d_left != G.d_right:
            raise ParameterError("incidence transfer needs a regular graph")
        d = G.d_left
        A = G.adjacency().toarray()
    else:
        degrees = {deg for _, deg in G.degree()}
        if len(degrees) != 1:
            raise ParameterError("incidence transfer needs a regular graph")
        d = degrees.pop()
        A = nx.to_numpy_array(G, weight=None)
    base = linalg.eigvalsh(A)
    mu2 = float(base[-2])
    H = edge_vertex_incidence(G)
    measured = lambda2(H).lambda2
    predicted = math.sqrt(mu2 + d)

    if pairing is None:
        pairing = H.n_vertices <= _DENSE_LIMIT
    deviation = None
    if pairing:
        inc = linalg.eigvalsh(H.adjacency().toarray())
        shifted = base + d
        roots = np.sqrt(shifted[shifted > 1e-6])
        expected = np.sort(np.concatenate([roots, -roots]))
        nonzero = np.sort(inc[np.abs(inc) > 1e-6])
        deviation = float(np.max(np.abs(expected - nonzero))) if len(expected) == len(nonzero) else math.inf
    return {
        "graph": getattr(G, "name", "") or "graph",
        "d": d,
        "mu2": mu2,
        "predicted": predicted,
        "measured": measured,
        "deviation": abs(predicted - measured),
        "pairing_deviation": deviation,
    }


# ── Subgraph density ───────────────────────────────────────────────────────

@dataclass
class DensityCheck:
    size: int
    left: int
    right: int
    edges: int
    d_left: float | None
    d_right: float | None
    lam: float
    lhs: float | None
    rhs: float
    passed: bool
    degenerate: bool
    gate: float
    gate_waived: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _split(G: DenseBipartiteGraph, S: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Left and right members of a set given in combined numbering."""
    idx = np.unique(np.asarray(list(S), dtype=np.int64))
    if len(idx) and (idx.min() < 0 or idx.max() >= G.n_vertices):
        raise ParameterError("vertex index out of range")
    return idx[idx < G.n_left], idx[idx >= G.n_left] - G.n_left


def induced_edges(G: DenseBipartiteGraph, S: Iterable[int]) -> np.ndarray:
    """Edges of G[S] as rows of the edge array (parallel edges repeated)."""
    left, right = _split(G, S)
    in_left = np.zeros(G.n_left, dtype=bool)
    in_left[left] = True
    in_right = np.zeros(G.n_right, dtype=bool)
    in_right[right] = True
    mask = in_left[G.edges[:, 0]] & in_right[G.edges[:, 1]]
    return G.edges[mask]


def subgraph_density_check(
    G: DenseBipartiteGraph,
    S: Iterable[int],
    c: int | None,
    d: int | None,
    epsilon: float,
    *,
    lambda2_value: float | None = None,
    gate_waived: bool = False,
) -> DensityCheck:
    """Average degrees of G[S] against the spectral density bound.

    c and d may be None to take them from G.

    With lam = max(lambda2, sqrt(c-1) + sqrt(d-1)) * (1 + 5 eps), checks
    (d_L - 1)(d_R - 1) <= lam^2 - (sqrt(c-1) - sqrt(d-1))^2, where d_L is the
    average degree in G[S] of S's vertices on the degree-c side. A set
    with no induced edge, or with an empty side, passes as degenerate.

    The size gate |S| <= d^(-1/eps) |V| is enforced unless gate_waived.

    Raises:
        PreconditionError: naming the first violated clause.
    """
    gl, gr = G.d_left, G.d_right
    if gl is None or gr is None:
        raise PreconditionError("G must be biregular")
    flip = gl > gr
    c = c if c is not None else min(gl, gr)
    d = d if d is not None else max(gl, gr)
    if (min(gl, gr), max(gl, gr)) != (c, d):
        raise PreconditionError(f"G is ({gl},{gr})-biregular, not ({c},{d})")
    if not 2 <= c <= d:
        raise PreconditionError(f"need 2 <= c <= d, got c={c}, d={d}")
    if c * d <= 6:
        raise PreconditionError(f"need c*d > 6, got {c * d}")
    if not 0 < epsilon < 0.01:
        raise PreconditionError(f"need 0 < eps < 0.01, got {epsilon}")
    members = list(S)
    gate = d ** (-1 / epsilon) * G.n_vertices
    if len(members) > gate and not gate_waived:
        raise PreconditionError(f"need |S| <= d^(-1/eps)|V| = {gate:.3g}, got |S| = {len(members)}")

    if lambda2_value is None:
        lambda2_value = lambda2(G).lambda2
    lam = max(lambda2_value, math.sqrt(c - 1) + math.sqrt(d - 1)) * (1 + 5 * epsilon)
    rhs = lam ** 2 - (math.sqrt(c - 1) - math.sqrt(d - 1)) ** 2

    left, right = _split(G, members)
    if flip:
        left, right = right, left
    m = len(induced_edges(G, members))
    base = dict(size=len(members), left=len(left), right=len(right), edges=m, lam=lam, rhs=rhs,
                gate=gate, gate_waived=gate_waived)
    if m == 0 or len(left) == 0 or len(right) == 0:
        return DensityCheck(d_left=None, d_right=None, lhs=None, passed=True, degenerate=True, **base)
    dl, dr = m / len(left), m / len(right)
    lhs = (dl - 1) * (dr - 1)
    return DensityCheck(d_left=dl, d_right=dr, lhs=lhs, passed=lhs <= rhs + 1e-9, degenerate=False, **base)


# ── Bethe-Hessian ──────────────────────────────────────────────────────────

def _induced_adjacency(G: DenseBipartiteGraph | nx.Graph, S: Iterable) -> np.ndarray:
    members = list(S)
    if isinstance(G, nx.Graph):
        return nx.to_numpy_array(G.subgraph(members), nodelist=members, weight=None, multigraph_weight=sum)
    edges = induced_edges(G, members)
    index = {v: i for i, v in enumerate(members)}
    A = np.zeros((len(members), len(members)))
    for u, v in edges.tolist():
        a, b = index[u], index[G.n_left + v]
        A[a, b] += 1
        A[b, a] += 1
    return A


def bethe_hessian(G: DenseBipartiteGraph | nx.Graph, S: Iterable, t: float) -> np.ndarray:
    """(D - I) t^2 - A t + I for the induced subgraph G[S]."""
    A = _induced_adjacency(G, S)
    D = np.diag(A.sum(axis=1))
    eye = np.eye(len(A))
    return (D - eye) * t * t - A * t + eye


def bethe_hessian_pd(G: DenseBipartiteGraph | nx.Graph, S: Iterable, t: float) -> bool:
    """Positive definiteness of the Bethe-Hessian of G[S] by Cholesky.

    A factorization whose smallest squared pivot is at most 1e-12 counts
    as not positive definite.
    """
    members = list(S)
    if not members:
        raise ParameterError("S must be nonempty")
    H = bethe_hessian(G, members, t)
    try:
        L = linalg.cholesky(H, lower=True)
    except linalg.LinAlgError:
        return False
    return bool(np.min(np.diag(L)) ** 2 > _PIVOT_TOL)


def critical_t(G: DenseBipartiteGraph | nx.Graph, S: Iterable, tol: float = 1e-6) -> float:
    """Largest t in (0, 1] with a positive definite Bethe-Hessian, by bisection."""
    members = list(S)
    if bethe_hessian_pd(G, members, 1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if bethe_hessian_pd(G, members, mid):
            lo = mid
        else:
            hi = mid
    return lo


def density_inequality(G: DenseBipartiteGraph, S: Iterable[int], t: float) -> dict:
    """Measured (d1 - 1)(d2 - 1) of G[S] against 1/t^2."""
    members = list(S)
    left, right = _split(G, members)
    m = len(induced_edges(G, members))
    if m == 0 or len(left) == 0 or len(right) == 0:
        return {"d1": None, "d2": None, "lhs": None, "rhs": 1 / (t * t), "holds": True, "degenerate": True}
    d1, d2 = m / len(left), m / len(right)
    lhs = (d1 - 1) * (d2 - 1)
    return {"d1": d1, "d2": d2, "lhs": lhs, "rhs": 1 / (t * t), "holds": lhs <= 1 / (t * t) + 1e-9,
            "degenerate": False}
