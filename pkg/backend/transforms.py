# -*- coding: utf-8 -*-
"""
transforms.py - Edge-vertex incidence graphs and tripartite products.

edge_vertex_incidence(G) turns a d-regular graph into the (2,d)-biregular
graph whose left vertices are the edges of G and whose right vertices are
the vertices of G.

tripartite_product(G1, G2, G0) glues two bipartite graphs that share a
middle set M (the right side of G1 is the left side of G2) through a small
gadget G0: every w in M carries a copy of G0 whose left vertices are w's
G1-slots and whose right vertices are w's G2-slots, and each gadget edge
(i, j) becomes a direct edge between the i-th G1-neighbor and the j-th
G2-neighbor of w. Parallel edges are kept.

TripartiteOracle answers the same product one neighbor at a time.
"""

from __future__ import annotations

import networkx as nx
import numpy as np

from errors import ParameterError
from graphs import LEFT, RIGHT, DenseBipartiteGraph, ExplicitBipartiteGraph


# ── Edge-vertex incidence ──────────────────────────────────────────────────

def canonical_edges(G: nx.Graph | DenseBipartiteGraph) -> tuple[int, np.ndarray]:
    """(vertex count, edges as sorted (min, max) rows) of a simple graph.

    networkx nodes are numbered in iteration order; a DenseBipartiteGraph
    uses the combined numbering (right vertex j is n_left + j).
    """
    if isinstance(G, DenseBipartiteGraph):
        if not G.multiplicity_free():
            raise ParameterError(f"{G.name} has parallel edges")
        n = G.n_vertices
        pairs = np.column_stack([G.edges[:, 0], G.edges[:, 1] + G.n_left])
    elif isinstance(G, nx.Graph):
        if G.is_multigraph() and any(G.number_of_edges(u, v) > 1 for u, v in G.edges()):
            raise ParameterError("input graph has parallel edges")
        index = {node: i for i, node in enumerate(G.nodes)}
        n = len(index)
        pairs = np.array([(index[u], index[v]) for u, v in G.edges()], dtype=np.int64).reshape(-1, 2)
    else:
        raise ParameterError(f"unsupported graph type: {type(G).__name__}")
    if len(pairs) and np.any(pairs[:, 0] == pairs[:, 1]):
        raise ParameterError("input graph has self-loops")
    pairs = np.sort(pairs, axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return n, pairs[order]


def edge_vertex_incidence(G: nx.Graph | DenseBipartiteGraph, name: str | None = None) -> DenseBipartiteGraph:
    """(2,d)-biregular incidence graph of a d-regular simple graph.

    Left vertex e is the e-th edge in lexicographic (min, max) order;
    right vertex v is vertex v of G.

    Raises:
        ParameterError: if G is irregular, has loops or parallel edges.
    """
    n, pairs = canonical_edges(G)
    deg = np.bincount(pairs.reshape(-1), minlength=n)
    if n == 0 or deg.min() != deg.max():
        raise ParameterError("edge-vertex incidence needs a regular graph")
    m = len(pairs)
    left = np.repeat(np.arange(m, dtype=np.int64), 2)
    label = name or f"EV({getattr(G, 'name', '') or 'G'})"
    return DenseBipartiteGraph(m, n, np.column_stack([left, pairs.reshape(-1)]), name=label)


# ── Tripartite product ─────────────────────────────────────────────────────

def _check_factors(G1: ExplicitBipartiteGraph, G2: ExplicitBipartiteGraph, G0: DenseBipartiteGraph) -> tuple[int, int]:
    D1, D2 = G1.d_right, G2.d_left
    if D1 is None:
        raise ParameterError(f"{G1.name} must be right-regular")
    if D2 is None:
        raise ParameterError(f"{G2.name} must be left-regular")
    if G1.n_right != G2.n_left:
        raise ParameterError(
            f"middle sets differ: {G1.name} has {G1.n_right} right vertices, {G2.name} has {G2.n_left} left"
        )
    if (G0.n_left, G0.n_right) != (D1, D2):
        raise ParameterError(f"gadget must have {D1}+{D2} vertices, got {G0.n_left}+{G0.n_right}")
    return D1, D2


def _slot_table(G: ExplicitBipartiteGraph, side: int) -> np.ndarray:
    """(n_side, degree) table of neighbors in slot order."""
    if isinstance(G, DenseBipartiteGraph):
        return G.neighbor_matrix(side)
    n, d = G.size(side), G.degree(side)
    table = np.empty((n, d), dtype=np.int64)
    for v in range(n):
        for s in range(d):
            table[v, s] = G.neighbor(side, v, s)[0]
    return table


def tripartite_product(
    G1: ExplicitBipartiteGraph,
    G2: ExplicitBipartiteGraph,
    G0: DenseBipartiteGraph,
    name: str | None = None,
) -> DenseBipartiteGraph:
    """Materialized tripartite product on L(G1) x R(G2).

    The edge multiset is {(n_G1(w, i), n_G2(w, j)) : w in M, (i, j) in E(G0)},
    so |E| = |M| * |E(G0)| exactly.

    Raises:
        ParameterError: on any size or regularity mismatch.
    """
    _check_factors(G1, G2, G0)
    label = name or f"TP({G1.name},{G2.name},{G0.name})"
    if G0.n_edges == 0:
        return DenseBipartiteGraph(G1.n_left, G2.n_right, np.empty((0, 2), dtype=np.int64), name=label)
    n1 = _slot_table(G1, RIGHT)
    n2 = _slot_table(G2, LEFT)
    left = n1[:, G0.edges[:, 0]].reshape(-1)
    right = n2[:, G0.edges[:, 1]].reshape(-1)
    return DenseBipartiteGraph(G1.n_left, G2.n_right, np.column_stack([left, right]), name=label)


class TripartiteOracle(ExplicitBipartiteGraph):
    """Strongly explicit tripartite product.

    Edges at a left vertex x are numbered by (G1-slot, G0-slot): edge
    s1 * d_left(G0) + s0 leaves x along its s1-th G1 edge to w, where x is
    gadget vertex i, then takes the s0-th gadget edge at i. Right vertices
    are numbered the same way with G2 and the gadget's right side.
    """

    def __init__(self, G1: ExplicitBipartiteGraph, G2: ExplicitBipartiteGraph, G0: DenseBipartiteGraph) -> None:
        _check_factors(G1, G2, G0)
        if G0.d_left is None or G0.d_right is None:
            raise ParameterError("the oracle needs a biregular gadget")
        if G1.d_left is None or G2.d_right is None:
            raise ParameterError("the oracle needs G1 left-regular and G2 right-regular")
        self.G1, self.G2, self.G0 = G1, G2, G0
        self.n_left = G1.n_left
        self.n_right = G2.n_right
        self.d_left = G1.d_left * G0.d_left
        self.d_right = G2.d_right * G0.d_right
        self.name = f"TP({G1.name},{G2.name},{G0.name})"

    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        if not 0 <= slot < self.degree(side):
            raise ParameterError(f"slot {slot} out of range 0..{self.degree(side) - 1}")
        g0 = self.G0
        if side == LEFT:
            s1, s0 = divmod(slot, g0.d_left)
            w, i = self.G1.neighbor(LEFT, vertex, s1)
            j, j_slot = g0.neighbor(LEFT, i, s0)
            y, w_slot = self.G2.neighbor(LEFT, w, j)
            return y, w_slot * g0.d_right + j_slot
        s2, s0 = divmod(slot, g0.d_right)
        w, j = self.G2.neighbor(RIGHT, vertex, s2)
        i, i_slot = g0.neighbor(RIGHT, j, s0)
        x, w_slot = self.G1.neighbor(RIGHT, w, i)
        return x, w_slot * g0.d_left + i_slot

    def describe(self) -> dict:
        info = super().describe()
        info["factors"] = [self.G1.name, self.G2.name, self.G0.name]
        return info


def tripartite_neighbor_oracle(
    G1: ExplicitBipartiteGraph, G2: ExplicitBipartiteGraph, G0: DenseBipartiteGraph
) -> TripartiteOracle:
    return TripartiteOracle(G1, G2, G0)
