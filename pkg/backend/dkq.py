# -*- coding: utf-8 -*-
"""
dkq.py - The algebraic incidence graph D(k,q) and its certificates.

Points and lines are vectors in Z_q^k whose coordinates carry labels
p_1, p_11, p_12, p_21, p_22, p'_22, p_23, p_32, ... A point and a line
are incident when, for every label after the first,

    l_ii   - p_ii   = l_1    * p_{i-1,i}
    l'_ii  - p'_ii  = l_{i,i-1} * p_1
    l_i,i+1 - p_i,i+1 = l_ii  * p_1
    l_i+1,i - p_i+1,i = l_1  * p'_ii

with equations on labels past the k-th simply dropped. Given a vertex and
the opposite first coordinate, the equations determine the neighbor one
coordinate at a time, which is what makes the graph strongly explicit.

The r-certificate (b_2, ..., b_r) is constant on connected components;
vertices with the all-zero certificate form CD(k,q) (see cd_graph.py).

Usage:
    >>> schema = coordinate_schema(7)
    >>> u = DkqVertex(POINT, (0,) * 7, 3)
    >>> dkq_neighbor(u, 0).coords
    (0, 0, 0, 0, 0, 0, 0)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import connected_components

from errors import ParameterError
from field_arith import FieldElem, check_prime, tick
from graphs import LEFT, RIGHT, DenseBipartiteGraph, ExplicitBipartiteGraph

POINT = LEFT
LINE = RIGHT

# Labels the equations and the certificate use that are not coordinates.
# A string value aliases another label; an int is a constant.
# Keys with side None apply to points and lines alike.
_BOUNDARY: dict[tuple[int | None, str], int | str] = {
    (None, "0,0"): -1,
    (None, "0,0'"): 1,
    (None, "-1,0"): 0,
    (None, "0,-1"): 0,
    (None, "1,1'"): "1,1",
    (POINT, "0,1"): "1",
    (POINT, "1,0"): 0,
    (LINE, "1,0"): "1",
    (LINE, "0,1"): 0,
}

_Ref = tuple[int | None, int]  # (coordinate index, or None with a constant)


def boundary_table() -> dict[str, dict[str, int | str]]:
    """The boundary conventions, grouped by side, for manifests and docs."""
    out: dict[str, dict[str, int | str]] = {"both": {}, "point": {}, "line": {}}
    for (side, label), value in _BOUNDARY.items():
        key = "both" if side is None else ("point" if side == POINT else "line")
        out[key][label] = value
    return out


# ── Schema ─────────────────────────────────────────────────────────────────

@lru_cache(maxsize=64)
def _schema(k: int) -> tuple[str, ...]:
    if k < 4:
        raise ParameterError(f"D(k,q) needs k >= 4, got {k}")
    labels = ["1", "1,1", "1,2", "2,1"]
    i = 2
    while len(labels) < k:
        labels += [f"{i},{i}", f"{i},{i}'", f"{i},{i + 1}", f"{i + 1},{i}"]
        i += 1
    return tuple(labels[:k])


def coordinate_schema(k: int) -> list[str]:
    """Ordered coordinate labels of a D(k,q) vertex.

    ``"i,j"`` stands for p_ij / l_ij and ``"i,i'"`` for p'_ii / l'_ii.

    Raises:
        ParameterError: if k < 4.
    """
    return list(_schema(k))


def _resolve(k: int, side: int, label: str) -> _Ref | None:
    """Coordinate index or constant for a label; None if past the truncation."""
    seen = set()
    while True:
        for key in ((side, label), (None, label)):
            if key in _BOUNDARY:
                value = _BOUNDARY[key]
                break
        else:
            value = None
        if isinstance(value, int):
            return (None, value)
        if isinstance(value, str):
            if value in seen:
                raise RuntimeError(f"alias cycle at {label}")
            seen.add(value)
            label = value
            continue
        try:
            return (_schema(k).index(label), 0)
        except ValueError:
            return None


def _equation_factors(label: str) -> tuple[str, str] | None:
    """(line factor, point factor) of the equation targeting label."""
    left, _, right = label.partition(",")
    primed = right.endswith("'")
    a, b = int(left), int(right.rstrip("'"))
    if primed:
        return (f"{a},{a - 1}", "1")
    if a == b:
        return ("1", f"{a - 1},{a}")
    if b == a + 1:
        return (f"{a},{a}", "1")
    if a == b + 1:
        return ("1", f"{b},{b}'")
    return None


@lru_cache(maxsize=64)
def incidence_plan(k: int) -> tuple[tuple[int, int, int], ...]:
    """Solve order for the incidence equations: (target, line factor, point factor).

    Every factor index is smaller than its target, so a neighbor can be
    filled in left to right.
    """
    plan = []
    for j, label in enumerate(_schema(k)[1:], start=1):
        factors = _equation_factors(label)
        if factors is None:
            raise RuntimeError(f"no incidence equation targets {label}")
        lf = _resolve(k, LINE, factors[0])
        pf = _resolve(k, POINT, factors[1])
        if lf is None or pf is None or lf[0] is None or pf[0] is None:
            raise RuntimeError(f"equation for {label} references a missing coordinate")
        if lf[0] >= j or pf[0] >= j:
            raise RuntimeError(f"equation for {label} is not in solve order")
        plan.append((j, lf[0], pf[0]))
    return tuple(plan)


# ── Vertices ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DkqVertex:
    """A point (side POINT) or line (side LINE) of D(k,q).

    ``coords`` holds residues mod q in coordinate_schema(k) order.
    """

    side: int
    coords: tuple[int, ...]
    q: int

    def __post_init__(self) -> None:
        check_prime(self.q)
        if self.side not in (POINT, LINE):
            raise ParameterError(f"bad side {self.side!r}")
        _schema(len(self.coords))
        if any(not 0 <= c < self.q for c in self.coords):
            raise ParameterError(f"coordinates must be residues mod {self.q}")

    @property
    def k(self) -> int:
        return len(self.coords)

    def elements(self) -> list[FieldElem]:
        return [FieldElem(c, self.q) for c in self.coords]

    def by_label(self) -> dict[str, int]:
        return dict(zip(_schema(self.k), self.coords))

    def index(self) -> int:
        """Base-q number of the coordinates, first coordinate most significant."""
        idx = 0
        for c in self.coords:
            idx = idx * self.q + c
        return idx

    @classmethod
    def from_index(cls, side: int, index: int, k: int, q: int) -> DkqVertex:
        coords = [0] * k
        for j in range(k - 1, -1, -1):
            index, coords[j] = divmod(index, q)
        return cls(side, tuple(coords), q)


@dataclass(frozen=True)
class Certificate:
    """The vector (b_2, ..., b_r) of a vertex."""

    entries: tuple[int, ...]
    r: int
    q: int

    def is_zero(self) -> bool:
        return not any(self.entries)


def dkq_neighbor(u: DkqVertex, t: int | FieldElem) -> DkqVertex:
    """The unique opposite-side vertex with first coordinate t incident to u."""
    q = u.q
    if isinstance(t, FieldElem):
        t = t.value
    t %= q
    src = u.coords
    out = [0] * u.k
    out[0] = t
    if u.side == POINT:
        # out is the line
        for j, li, pi in incidence_plan(u.k):
            out[j] = (src[j] + out[li] * src[pi]) % q
        side = LINE
    else:
        for j, li, pi in incidence_plan(u.k):
            out[j] = (src[j] - src[li] * out[pi]) % q
        side = POINT
    tick(2 * (u.k - 1))
    return DkqVertex(side, tuple(out), q)


def is_incident(point: DkqVertex, line: DkqVertex) -> bool:
    return point.side == POINT and line.side == LINE and dkq_neighbor(point, line.coords[0]) == line


# ── Certificates ───────────────────────────────────────────────────────────

def certificate_radius(k: int) -> int:
    """The pinned certificate length r = floor((k+2)/4)."""
    return (k + 2) // 4


@lru_cache(maxsize=256)
def _certificate_plan(k: int, side: int, r: int) -> tuple[tuple[tuple[_Ref, _Ref, _Ref, _Ref], ...], ...]:
    """Per t = 2..r, the (x, y, z, w) refs of the terms x*y - z*w."""
    plan = []
    for t in range(2, r + 1):
        terms = []
        for i in range(t + 1):
            j = t - i
            x = _resolve(k, side, f"{i},{i}")
            y = _resolve(k, side, f"{j},{j}'")
            z = _resolve(k, side, f"{i},{i + 1}")
            w = _resolve(k, side, f"{j},{j - 1}")
            for a, b in ((x, y), (z, w)):
                zero_factor = (a is not None and a == (None, 0)) or (b is not None and b == (None, 0))
                if (a is None or b is None) and not zero_factor:
                    raise ParameterError(f"certificate b_{t} needs coordinates past k={k}")
            terms.append((x, y, z, w))
        plan.append(tuple(terms))
    return tuple(plan)


def _term(coords, a: _Ref | None, b: _Ref | None):
    if a is None or b is None or a == (None, 0) or b == (None, 0):
        return 0
    va = a[1] if a[0] is None else coords[a[0]]
    vb = b[1] if b[0] is None else coords[b[0]]
    return va * vb


def certificate(u: DkqVertex, r: int) -> Certificate:
    """b_t(u) = sum_i (u_ii * u'_{t-i,t-i} - u_{i,i+1} * u_{t-i,t-i-1}), t = 2..r.

    The partner coordinate is indexed by t-i, not r-i, so b_t is the degree-t
    part of the AB - CD identity and is constant along every edge.

    Raises:
        ParameterError: if r is outside 1..floor((k+2)/4).
    """
    if not 1 <= r <= certificate_radius(u.k):
        raise ParameterError(f"certificate radius must be in 1..{certificate_radius(u.k)}, got {r}")
    entries = []
    for terms in _certificate_plan(u.k, u.side, r):
        acc = 0
        for x, y, z, w in terms:
            acc += _term(u.coords, x, y) - _term(u.coords, z, w)
        tick(4 * len(terms))
        entries.append(acc % u.q)
    return Certificate(tuple(entries), r, u.q)


# ── Vectorized forms (materialization, census, brute-force counts) ─────────

def all_coordinates(k: int, q: int) -> np.ndarray:
    """Every vector of Z_q^k in index order, shape (q**k, k)."""
    idx = np.arange(q ** k, dtype=np.int64)
    return np.stack(np.unravel_index(idx, (q,) * k), axis=1).astype(np.int64)


def batch_neighbors(coords: np.ndarray, t: int | np.ndarray, side: int, q: int) -> np.ndarray:
    """dkq_neighbor applied row-wise to an (n, k) coordinate array."""
    k = coords.shape[1]
    out = np.empty_like(coords)
    out[:, 0] = np.asarray(t) % q
    if side == POINT:
        for j, li, pi in incidence_plan(k):
            out[:, j] = (coords[:, j] + out[:, li] * coords[:, pi]) % q
    else:
        for j, li, pi in incidence_plan(k):
            out[:, j] = (coords[:, j] - coords[:, li] * out[:, pi]) % q
    return out


def batch_certificates(coords: np.ndarray, side: int, q: int, r: int) -> np.ndarray:
    """Certificates of an (n, k) coordinate array, shape (n, r-1)."""
    k = coords.shape[1]
    if not 1 <= r <= certificate_radius(k):
        raise ParameterError(f"certificate radius must be in 1..{certificate_radius(k)}, got {r}")
    plan = _certificate_plan(k, side, r)
    out = np.zeros((len(coords), len(plan)), dtype=np.int64)

    def col(ref):
        return np.int64(ref[1]) if ref[0] is None else coords[:, ref[0]]

    for c, terms in enumerate(plan):
        acc = np.zeros(len(coords), dtype=np.int64)
        for x, y, z, w in terms:
            for a, b, sign in ((x, y, 1), (z, w, -1)):
                if a is None or b is None or a == (None, 0) or b == (None, 0):
                    continue
                acc += sign * (col(a) * col(b))
        out[:, c] = acc % q
    return out


def certificate_keys(certs: np.ndarray, q: int) -> np.ndarray:
    """Collapse certificate rows to single integers (base q)."""
    key = np.zeros(len(certs), dtype=np.int64)
    for c in range(certs.shape[1]):
        key = key * q + certs[:, c]
    return key


# ── The graph ──────────────────────────────────────────────────────────────

class DkqGraph(ExplicitBipartiteGraph):
    """Oracle for the full D(k,q): (q,q)-biregular on q^k + q^k vertices.

    Vertex indices are DkqVertex.index(); slot s at a vertex leads to the
    neighbor whose first coordinate is s, so the co-slot is the first
    coordinate of the vertex itself.
    """

    def __init__(self, k: int, q: int) -> None:
        check_prime(q)
        _schema(k)
        self.k = k
        self.q = q
        self.n_left = self.n_right = q ** k
        self.d_left = self.d_right = q
        self.name = f"D({k},{q})"

    def vertex(self, side: int, index: int) -> DkqVertex:
        if not 0 <= index < self.n_left:
            raise ParameterError(f"vertex index {index} out of range")
        return DkqVertex.from_index(side, index, self.k, self.q)

    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        if not 0 <= slot < self.q:
            raise ParameterError(f"slot {slot} out of range 0..{self.q - 1}")
        u = self.vertex(side, vertex)
        return dkq_neighbor(u, slot).index(), u.coords[0]

    def slot_of(self, side: int, vertex: int, other: int) -> int:
        w = DkqVertex.from_index(1 - side, other, self.k, self.q)
        if dkq_neighbor(self.vertex(side, vertex), w.coords[0]) != w:
            raise ParameterError(f"{vertex} and {other} are not incident in {self.name}")
        return w.coords[0]

    def materialize(self) -> DenseBipartiteGraph:
        points = all_coordinates(self.k, self.q)
        n = len(points)
        right = np.empty((n, self.q), dtype=np.int64)
        weights = self.q ** np.arange(self.k - 1, -1, -1, dtype=np.int64)
        for t in range(self.q):
            right[:, t] = batch_neighbors(points, t, POINT, self.q) @ weights
        left = np.repeat(np.arange(n, dtype=np.int64), self.q)
        return DenseBipartiteGraph(n, n, np.column_stack([left, right.reshape(-1)]), name=self.name)

    def describe(self) -> dict:
        info = super().describe()
        info.update({"kind": "dkq", "k": self.k, "q": self.q,
                     "schema": coordinate_schema(self.k), "boundary": boundary_table()})
        return info


def dkq_graph(k: int, q: int) -> DkqGraph:
    return DkqGraph(k, q)


def component_census(k: int, q: int) -> dict:
    """Connected components of D(k,q) against certificate classes.

    Returns a dict with the component count, the number of distinct
    certificates among points, the expected count q^(r-1), the component
    sizes (points, lines) and whether every certificate class is exactly
    one component.
    """
    graph = DkqGraph(k, q).materialize()
    n_comp, labels = connected_components(graph.adjacency(), directed=False)
    r = certificate_radius(k)
    n = graph.n_left
    point_keys = certificate_keys(batch_certificates(all_coordinates(k, q), POINT, q, r), q)
    point_comp = labels[:n]

    classes = np.unique(point_keys)
    # every component carries one certificate and every certificate one component
    pairs = np.unique(np.column_stack([point_comp, point_keys]), axis=0)
    one_to_one = len(pairs) == len(classes) == n_comp
    sizes = sorted(
        (int(np.sum(point_comp == c)), int(np.sum(labels[n:] == c))) for c in range(n_comp)
    )
    return {
        "k": k,
        "q": q,
        "r": r,
        "components": int(n_comp),
        "certificate_classes": int(len(classes)),
        "expected": q ** (r - 1),
        "sizes": sizes,
        "classes_are_components": bool(one_to_one),
    }
