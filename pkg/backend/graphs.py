# -*- coding: utf-8 -*-
"""
graphs.py - Bipartite graph containers shared by every UNForge module.

Two views of the same object:

- ExplicitBipartiteGraph: the oracle contract. Sizes, bidegrees and
  neighbor(side, vertex, slot) -> (vertex, co-slot), answered without
  materializing anything. D(k,q), CD(k,q,A,B), LPS and the tripartite
  composite all implement it.
- DenseBipartiteGraph: a materialized edge array (multigraph-capable),
  used by the transforms, the verification suite and the file format.

Vertices are 0-based per side. Where a single vertex numbering is needed
(girth, balls, spectra) left vertex i is i and right vertex j is
n_left + j.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable

import networkx as nx
import numpy as np
from scipy import sparse

from errors import ParameterError

LEFT = 0
RIGHT = 1
SIDE_NAMES = {LEFT: "left", RIGHT: "right"}


def other_side(side: int) -> int:
    return RIGHT if side == LEFT else LEFT


def parse_side(side: int | str) -> int:
    """Accept 0/1 or 'left'/'right' (as written in audit specs)."""
    if side in (LEFT, RIGHT):
        return int(side)
    if isinstance(side, str) and side.lower() in ("left", "l", "point", "points"):
        return LEFT
    if isinstance(side, str) and side.lower() in ("right", "r", "line", "lines"):
        return RIGHT
    raise ParameterError(f"unknown side: {side!r}")


# ── Oracle contract ────────────────────────────────────────────────────────

class ExplicitBipartiteGraph(ABC):
    """A biregular bipartite graph answered one neighbor query at a time.

    Subclasses set n_left, n_right, d_left, d_right and implement
    neighbor(). slot_of() defaults to a scan over the d slots, which is
    fine at the bidegrees used here.
    """

    n_left: int
    n_right: int
    d_left: int | None
    d_right: int | None
    name: str = "graph"

    @abstractmethod
    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        """Return (neighbor index, co-slot) of the slot-th edge at vertex."""

    def size(self, side: int) -> int:
        return self.n_left if side == LEFT else self.n_right

    def degree(self, side: int) -> int | None:
        return self.d_left if side == LEFT else self.d_right

    def slot_of(self, side: int, vertex: int, other: int) -> int:
        """Slot at which vertex sees other (first one, for multi-edges)."""
        for slot in range(self.degree(side) or 0):
            if self.neighbor(side, vertex, slot)[0] == other:
                return slot
        raise ParameterError(
            f"{SIDE_NAMES[side]} vertex {vertex} is not adjacent to {other} in {self.name}"
        )

    def describe(self) -> dict:
        return {
            "name": self.name,
            "n_left": self.n_left,
            "n_right": self.n_right,
            "d_left": self.d_left,
            "d_right": self.d_right,
        }

    def materialize(self) -> DenseBipartiteGraph:
        """Query every left slot and collect the edge array."""
        d = self.d_left
        if d is None:
            raise ParameterError(f"{self.name} is not left-regular; cannot materialize by slots")
        right = np.empty((self.n_left, d), dtype=np.int64)
        for v in range(self.n_left):
            for s in range(d):
                right[v, s] = self.neighbor(LEFT, v, s)[0]
        left = np.repeat(np.arange(self.n_left, dtype=np.int64), d)
        edges = np.column_stack([left, right.reshape(-1)])
        return DenseBipartiteGraph(self.n_left, self.n_right, edges, name=self.name)


# ── Materialized graph ─────────────────────────────────────────────────────

class DenseBipartiteGraph(ExplicitBipartiteGraph):
    """Materialized bipartite multigraph.

    Edges are kept in an (m, 2) int64 array of (left, right) pairs, stably
    sorted by left vertex; the slot of an edge at its left endpoint is its
    rank among that vertex's edges, and at its right endpoint its rank in
    the stable order by right vertex. Repeated rows are parallel edges.

    Args:
        n_left: Number of left vertices.
        n_right: Number of right vertices.
        edges: Iterable of (left, right) pairs.
        name: Label used in manifests and messages.
    """

    def __init__(self, n_left: int, n_right: int, edges: Iterable | np.ndarray, name: str = "graph") -> None:
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if n_left < 0 or n_right < 0:
            raise ParameterError("vertex counts must be non-negative")
        if arr.size and (arr[:, 0].min() < 0 or arr[:, 0].max() >= n_left
                         or arr[:, 1].min() < 0 or arr[:, 1].max() >= n_right):
            raise ParameterError(f"edge index out of range for {n_left}+{n_right} vertices")

        self.n_left = int(n_left)
        self.n_right = int(n_right)
        self.name = name
        self.edges = arr[np.argsort(arr[:, 0], kind="stable")]
        self.edges.setflags(write=False)

        m = len(self.edges)
        self._left_deg = np.bincount(self.edges[:, 0], minlength=self.n_left)
        self._right_deg = np.bincount(self.edges[:, 1], minlength=self.n_right)
        self._left_ptr = np.concatenate([[0], np.cumsum(self._left_deg)])
        self._right_ptr = np.concatenate([[0], np.cumsum(self._right_deg)])
        self._right_edges = np.argsort(self.edges[:, 1], kind="stable")
        self._right_slot = np.empty(m, dtype=np.int64)
        self._right_slot[self._right_edges] = (
            np.arange(m) - self._right_ptr[self.edges[self._right_edges, 1]]
        )

    @classmethod
    def from_networkx(cls, G: nx.Graph, left_nodes: Iterable, name: str = "graph") -> DenseBipartiteGraph:
        """Build from a bipartite networkx (multi)graph and its left part.

        Left and right vertices are numbered in sorted node order.
        """
        left = sorted(left_nodes)
        left_set = set(left)
        right = sorted(n for n in G.nodes if n not in left_set)
        li = {n: i for i, n in enumerate(left)}
        ri = {n: j for j, n in enumerate(right)}
        pairs = []
        for u, v in G.edges():
            if u in left_set and v in left_set or u not in left_set and v not in left_set:
                raise ParameterError(f"edge ({u}, {v}) does not cross the bipartition")
            if u in left_set:
                pairs.append((li[u], ri[v]))
            else:
                pairs.append((li[v], ri[u]))
        return cls(len(left), len(right), pairs, name=name)

    # ── Shape ──────────────────────────────────────────────────────────────

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return self.n_left + self.n_right

    def degrees(self, side: int) -> np.ndarray:
        return self._left_deg if side == LEFT else self._right_deg

    def _regular_degree(self, side: int) -> int | None:
        deg = self.degrees(side)
        if len(deg) == 0:
            return 0
        lo, hi = int(deg.min()), int(deg.max())
        return lo if lo == hi else None

    @property
    def d_left(self) -> int | None:  # type: ignore[override]
        return self._regular_degree(LEFT)

    @property
    def d_right(self) -> int | None:  # type: ignore[override]
        return self._regular_degree(RIGHT)

    def is_biregular(self, c: int | None = None, d: int | None = None) -> bool:
        dl, dr = self.d_left, self.d_right
        if dl is None or dr is None:
            return False
        return (c is None or dl == c) and (d is None or dr == d)

    def multiplicity_free(self) -> bool:
        if self.n_edges == 0:
            return True
        keys = self.edges[:, 0] * self.n_right + self.edges[:, 1]
        return len(np.unique(keys)) == len(keys)

    # ── Adjacency queries ──────────────────────────────────────────────────

    def neighbors(self, side: int, v: int) -> np.ndarray:
        """Neighbors of v in slot order, repeated for parallel edges."""
        if side == LEFT:
            return self.edges[self._left_ptr[v]:self._left_ptr[v + 1], 1]
        ids = self._right_edges[self._right_ptr[v]:self._right_ptr[v + 1]]
        return self.edges[ids, 0]

    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        if side == LEFT:
            if not 0 <= slot < self._left_deg[vertex]:
                raise ParameterError(f"slot {slot} out of range at left vertex {vertex}")
            e = self._left_ptr[vertex] + slot
            return int(self.edges[e, 1]), int(self._right_slot[e])
        if not 0 <= slot < self._right_deg[vertex]:
            raise ParameterError(f"slot {slot} out of range at right vertex {vertex}")
        e = self._right_edges[self._right_ptr[vertex] + slot]
        u = int(self.edges[e, 0])
        return u, int(e - self._left_ptr[u])

    def slot_of(self, side: int, vertex: int, other: int) -> int:
        hits = np.flatnonzero(self.neighbors(side, vertex) == other)
        if len(hits) == 0:
            raise ParameterError(f"{SIDE_NAMES[side]} vertex {vertex} is not adjacent to {other} in {self.name}")
        return int(hits[0])

    def neighbor_matrix(self, side: int) -> np.ndarray:
        """Padded (n_side, max_degree) neighbor table, -1 marks empty slots."""
        deg = self.degrees(side)
        n = len(deg)
        width = int(deg.max()) if n and self.n_edges else 0
        table = np.full((n, max(width, 1)), -1, dtype=np.int64)
        if self.n_edges == 0:
            return table
        if side == LEFT:
            owner, value, ptr = self.edges[:, 0], self.edges[:, 1], self._left_ptr
        else:
            ids = self._right_edges
            owner, value, ptr = self.edges[ids, 1], self.edges[ids, 0], self._right_ptr
        col = np.arange(self.n_edges) - ptr[owner]
        table[owner, col] = value
        return table

    def materialize(self) -> DenseBipartiteGraph:
        return self

    # ── Conversions ────────────────────────────────────────────────────────

    def transpose(self, name: str | None = None) -> DenseBipartiteGraph:
        """Swap the sides: right vertices become left vertices."""
        return DenseBipartiteGraph(
            self.n_right, self.n_left, self.edges[:, ::-1].copy(), name=name or f"{self.name}^T"
        )

    def biadjacency(self) -> sparse.csr_matrix:
        """Sparse n_left x n_right matrix with edge multiplicities."""
        data = np.ones(self.n_edges, dtype=np.float64)
        mat = sparse.coo_matrix(
            (data, (self.edges[:, 0], self.edges[:, 1])), shape=(self.n_left, self.n_right)
        )
        return mat.tocsr()

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric adjacency on the combined vertex numbering."""
        b = self.biadjacency()
        return sparse.bmat([[None, b], [b.T, None]], format="csr")

    def to_networkx(self) -> nx.MultiGraph:
        """MultiGraph on nodes 0..n_left+n_right-1 with a 'bipartite' attribute."""
        G = nx.MultiGraph()
        G.add_nodes_from(range(self.n_left), bipartite=0)
        G.add_nodes_from(range(self.n_left, self.n_vertices), bipartite=1)
        G.add_edges_from((int(u), int(self.n_left + v)) for u, v in self.edges)
        return G

    def same_edges(self, other: DenseBipartiteGraph) -> bool:
        """Equal sizes and equal edge multisets."""
        if (self.n_left, self.n_right, self.n_edges) != (other.n_left, other.n_right, other.n_edges):
            return False
        a = np.lexsort((self.edges[:, 1], self.edges[:, 0]))
        b = np.lexsort((other.edges[:, 1], other.edges[:, 0]))
        return bool(np.array_equal(self.edges[a], other.edges[b]))

    def __repr__(self) -> str:
        return (f"DenseBipartiteGraph({self.name!r}, {self.n_left}+{self.n_right}, "
                f"m={self.n_edges}, bidegree=({self.d_left}, {self.d_right}))")


# ── Flat view for traversal ────────────────────────────────────────────────

@dataclass(frozen=True)
class FlatGraph:
    """CSR adjacency over a single vertex numbering.

    ``eid[k]`` identifies the undirected edge behind ``nbr[k]`` so that a
    BFS can tell a parallel edge from the edge it arrived on.
    ``n_left`` is set for bipartite inputs (left vertices come first).
    """

    n: int
    indptr: np.ndarray
    nbr: np.ndarray
    eid: np.ndarray
    n_edges: int
    n_left: int | None = None
    labels: tuple | None = None

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbr[self.indptr[v]:self.indptr[v + 1]]

    def edge_ids(self, v: int) -> np.ndarray:
        return self.eid[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])


def _flat_from_pairs(n: int, us: np.ndarray, vs: np.ndarray, **extra) -> FlatGraph:
    m = len(us)
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    ids = np.concatenate([np.arange(m), np.arange(m)])
    order = np.argsort(src, kind="stable")
    indptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n))])
    return FlatGraph(n, indptr, dst[order], ids[order], m, **extra)


def flatten(G: DenseBipartiteGraph | nx.Graph) -> FlatGraph:
    """Single-numbering CSR view of a bipartite or general graph.

    networkx inputs are numbered in node iteration order; the original
    node names are kept in ``labels``. Self-loops are rejected.
    """
    if isinstance(G, DenseBipartiteGraph):
        us = G.edges[:, 0]
        vs = G.edges[:, 1] + G.n_left
        return _flat_from_pairs(G.n_vertices, us, vs, n_left=G.n_left)
    if isinstance(G, nx.Graph):
        nodes = list(G.nodes)
        index = {node: i for i, node in enumerate(nodes)}
        pairs = np.array([(index[u], index[v]) for u, v in G.edges()], dtype=np.int64).reshape(-1, 2)
        if len(pairs) and np.any(pairs[:, 0] == pairs[:, 1]):
            raise ParameterError("self-loops are not supported")
        return _flat_from_pairs(len(nodes), pairs[:, 0], pairs[:, 1], labels=tuple(nodes))
    raise ParameterError(f"unsupported graph type: {type(G).__name__}")
