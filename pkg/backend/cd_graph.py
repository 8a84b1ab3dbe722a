# -*- coding: utf-8 -*-
"""
cd_graph.py - The unbalanced component CD(k,q,A,B) and its index bijections.

CD(k,q,A,B) keeps the points of D(k,q) with p_1 in A and the lines with
l_1 in B, both with the all-zero r-certificate (r = floor((k+2)/4)). It is
(|B|,|A|)-biregular and inherits the girth bound k+4.

Indexing works through four truncated polynomials read off a vertex u:

    A_u = sum u_ii x^i      B_u = sum u'_ii x^i
    C_u = sum u_i,i+1 x^i   D_u = sum u_i,i-1 x^i

A zero certificate is exactly C_u * D_u = A_u * B_u + 1 mod x^(r+1).
On the point side C_u is a unit (c_0 = p_1 is in A), so D_u follows from
A_u, B_u, C_u. On the line side c_0 = d_0 = 0 and d_1 = l_1 is in B, so
c_1..c_(r-1) follow from A_u, B_u, D_u after dividing by x^2. Every other
coordinate is free. Indices are mixed-radix numbers over the free values,
selector first (position of p_1 in sorted A, or of l_1 in sorted B).

Usage:
    >>> params = CdParams(7, 3, (1, 2), (1, 2))
    >>> graph = CdGraph(params)
    >>> graph.n_left, graph.d_left
    (486, 2)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from dkq import (
    LINE,
    POINT,
    DkqVertex,
    all_coordinates,
    batch_certificates,
    certificate,
    certificate_radius,
    coordinate_schema,
    dkq_neighbor,
)
from errors import NotInComponent, ParameterError
from field_arith import TruncPoly, check_prime, poly_inverse, poly_mul, poly_shift_down, tick
from graphs import ExplicitBipartiteGraph


@dataclass(frozen=True)
class CdParams:
    """Parameters of CD(k,q,A,B).

    A and B are stored sorted and deduplicated; slot j at a point leads to
    the line with l_1 = B[j], slot j at a line to the point with p_1 = A[j].
    """

    k: int
    q: int
    A: tuple[int, ...]
    B: tuple[int, ...]

    def __post_init__(self) -> None:
        check_prime(self.q)
        if self.k < 7 or self.k % 2 == 0:
            raise ParameterError(f"CD needs odd k >= 7, got k={self.k}")
        for name in ("A", "B"):
            values = tuple(sorted(set(int(a) for a in getattr(self, name))))
            if not values:
                raise ParameterError(f"{name} must be nonempty")
            if values[0] < 1 or values[-1] > self.q - 1:
                raise ParameterError(f"{name} must be a subset of 1..{self.q - 1}, got {values}")
            object.__setattr__(self, name, values)

    @property
    def r(self) -> int:
        return certificate_radius(self.k)

    @property
    def r_alternative(self) -> int:
        """The floor((k+4)/4) reading of r; recorded, never used."""
        return (self.k + 4) // 4

    def selectors(self, side: int) -> tuple[int, ...]:
        return self.A if side == POINT else self.B

    @classmethod
    def from_degrees(cls, k: int, q: int, d1: int, d2: int) -> CdParams:
        """A = [1, d1], B = [1, d2]: a (d2, d1)-biregular CD graph."""
        return cls(k, q, tuple(range(1, d1 + 1)), tuple(range(1, d2 + 1)))


# ── Layout of the free values ──────────────────────────────────────────────

@dataclass(frozen=True)
class _Layout:
    side: int
    a: tuple[int, ...]        # positions of a_1..a_r   (u_ii)
    b: tuple[int, ...]        # positions of b_2..b_r   (u'_ii)
    c: tuple[int, ...]        # positions of c_1..c_r   (u_i,i+1)
    d: tuple[int, ...]        # positions of d_2..d_r   (u_i,i-1)
    digits: tuple[int, ...]   # positions read as base-q digits, in order
    free: tuple[int, ...] = field(default=())


def _layout(k: int, r: int, side: int) -> _Layout:
    pos = {label: j for j, label in enumerate(coordinate_schema(k))}
    a = tuple(pos[f"{i},{i}"] for i in range(1, r + 1))
    b = tuple(pos[f"{i},{i}'"] for i in range(2, r + 1))
    c = tuple(pos[f"{i},{i + 1}"] for i in range(1, r + 1))
    d = tuple(pos[f"{i},{i - 1}"] for i in range(2, r + 1))
    used = {0, *a, *b, *c, *d}
    free = tuple(j for j in range(k) if j not in used)
    if side == POINT:
        digits = a + b + c + free
    else:
        digits = a + b + d + (c[-1],) + free
    return _Layout(side, a, b, c, d, digits, free)


def _polys(coords: list[int] | tuple[int, ...], lay: _Layout, q: int, r: int):
    """A_u and B_u of a coordinate vector (a_0 = -1, b_0 = 1, b_1 = a_1)."""
    a_vals = [coords[j] for j in lay.a]
    A = TruncPoly.from_values([-1] + a_vals, q, r)
    B = TruncPoly.from_values([1, a_vals[0]] + [coords[j] for j in lay.b], q, r)
    return A, B


# ── The graph ──────────────────────────────────────────────────────────────

class CdGraph(ExplicitBipartiteGraph):
    """Strongly explicit CD(k,q,A,B): points on the left, lines on the right.

    Args:
        params: Validated CdParams.
    """

    def __init__(self, params: CdParams) -> None:
        self.params = params
        self.k, self.q, self.r = params.k, params.q, params.r
        self._layouts = {side: _layout(self.k, self.r, side) for side in (POINT, LINE)}
        self.n_left = cd_vertex_count(params, POINT)
        self.n_right = cd_vertex_count(params, LINE)
        self.d_left = len(params.B)
        self.d_right = len(params.A)
        self.name = f"CD({self.k},{self.q},{list(params.A)},{list(params.B)})"

    def _radices(self, side: int) -> list[int]:
        lay = self._layouts[side]
        return [len(self.params.selectors(side))] + [self.q] * len(lay.digits)

    # f_U / f_V
    def index_to_vertex(self, side: int, index: int) -> DkqVertex:
        """The index-th vertex of the given side."""
        size = self.size(side)
        if not 0 <= index < size:
            raise ParameterError(f"index {index} out of range 0..{size - 1}")
        q, r, k = self.q, self.r, self.k
        lay = self._layouts[side]

        radices = self._radices(side)
        digits = [0] * len(radices)
        rest = index
        for n in range(len(radices) - 1, -1, -1):
            rest, digits[n] = divmod(rest, radices[n])

        coords = [0] * k
        coords[0] = self.params.selectors(side)[digits[0]]
        for j, value in zip(lay.digits, digits[1:]):
            coords[j] = value

        A, B = _polys(coords, lay, q, r)
        AB1 = poly_mul(A, B)
        AB1 = TruncPoly(((AB1.coeffs[0] + 1) % q,) + AB1.coeffs[1:], q, r)
        tick()
        if side == POINT:
            # D = (A*B + 1) * C^-1
            C = TruncPoly.from_values([coords[0]] + [coords[j] for j in lay.c], q, r)
            D = poly_mul(AB1, poly_inverse(C))
            for i, j in zip(range(2, r + 1), lay.d):
                coords[j] = D.coeffs[i]
        else:
            # C' = ((A*B + 1) / x^2) * D'^-1 mod x^(r-1), with D = x D'
            quotient = poly_shift_down(AB1, 2)
            d_vals = [coords[0]] + [coords[j] for j in lay.d]
            D_prime = TruncPoly.from_values(d_vals, q, r - 2)
            C_prime = poly_mul(quotient, poly_inverse(D_prime))
            for i, j in zip(range(1, r), lay.c[:-1]):
                coords[j] = C_prime.coeffs[i - 1]
        return DkqVertex(side, tuple(coords), q)

    # f_U^-1 / f_V^-1
    def vertex_to_index(self, side: int, u: DkqVertex) -> int:
        """Inverse of index_to_vertex.

        Raises:
            NotInComponent: if u is on the other side, has the wrong shape,
                has a first coordinate outside A/B, or a nonzero certificate.
        """
        if u.side != side or u.k != self.k or u.q != self.q:
            raise NotInComponent(f"vertex {u} is not a {'point' if side == POINT else 'line'} of {self.name}")
        selectors = self.params.selectors(side)
        if u.coords[0] not in selectors:
            raise NotInComponent(f"first coordinate {u.coords[0]} not in {list(selectors)}")
        if not certificate(u, self.r).is_zero():
            raise NotInComponent(f"vertex {u.coords} has a nonzero certificate")

        lay = self._layouts[side]
        index = selectors.index(u.coords[0])
        for j in lay.digits:
            index = index * self.q + u.coords[j]
        return index

    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        other = LINE if side == POINT else POINT
        targets = self.params.selectors(other)
        if not 0 <= slot < len(targets):
            raise ParameterError(f"slot {slot} out of range 0..{len(targets) - 1}")
        u = self.index_to_vertex(side, vertex)
        v = dkq_neighbor(u, targets[slot])
        co_slot = self.params.selectors(side).index(u.coords[0])
        return self.vertex_to_index(other, v), co_slot

    def slot_of(self, side: int, vertex: int, other: int) -> int:
        other_side = LINE if side == POINT else POINT
        w = self.index_to_vertex(other_side, other)
        slot = self.params.selectors(other_side).index(w.coords[0])
        if self.neighbor(side, vertex, slot)[0] != other:
            raise ParameterError(f"{vertex} and {other} are not adjacent in {self.name}")
        return slot

    @cached_property
    def counts(self) -> dict:
        return {
            "enumerated_left": self.n_left,
            "enumerated_right": self.n_right,
            "closed_form_left": cd_closed_form_count(self.params, POINT),
            "closed_form_right": cd_closed_form_count(self.params, LINE),
        }

    def describe(self) -> dict:
        return cd_manifest(self.params)


# ── Module-level operations ────────────────────────────────────────────────

def cd_vertex_count(params: CdParams, side: int) -> int:
    """Number of vertices on a side, read off the index layout.

    |selectors| * q^(number of free digits) = |A| q^(k-r) for points.
    """
    lay = _layout(params.k, params.r, side)
    return len(params.selectors(side)) * params.q ** len(lay.digits)


def cd_closed_form_count(params: CdParams, side: int) -> int:
    """The closed form |A| q^(k+1-r) (|B| for lines), kept for comparison."""
    return len(params.selectors(side)) * params.q ** (params.k + 1 - params.r)


def cd_brute_force_count(params: CdParams, side: int) -> int:
    """Count members by scanning all q^k vectors (small k and q only)."""
    coords = all_coordinates(params.k, params.q)
    mask = np.isin(coords[:, 0], params.selectors(side))
    certs = batch_certificates(coords[mask], side, params.q, params.r)
    return int(np.sum(~certs.any(axis=1)))


@lru_cache(maxsize=16)
def cd_graph(params: CdParams) -> CdGraph:
    return CdGraph(params)


def cd_index_to_vertex(params: CdParams, side: int, i: int) -> DkqVertex:
    return cd_graph(params).index_to_vertex(side, i)


def cd_vertex_to_index(params: CdParams, side: int, u: DkqVertex) -> int:
    return cd_graph(params).vertex_to_index(side, u)


def cd_neighbor(params: CdParams, side: int, i: int, j: int) -> int:
    """Index of the j-th neighbor of vertex i on the given side."""
    return cd_graph(params).neighbor(side, i, j)[0]


def cd_manifest(params: CdParams) -> dict:
    """Construction manifest: parameters, both r readings, both counts."""
    notes = []
    sides = {}
    for side, name in ((POINT, "points"), (LINE, "lines")):
        enumerated = cd_vertex_count(params, side)
        closed = cd_closed_form_count(params, side)
        sides[name] = {"enumerated": enumerated, "closed_form": closed, "agree": enumerated == closed}
        if enumerated != closed:
            notes.append(
                f"{name}: enumerated count {enumerated} differs from closed form {closed} "
                f"(ratio q^{round(np.log(closed / enumerated) / np.log(params.q))})"
            )
    notes.append(f"r pinned to floor((k+2)/4) = {params.r}; floor((k+4)/4) = {params.r_alternative}")
    return {
        "kind": "cd",
        "name": f"CD({params.k},{params.q},{list(params.A)},{list(params.B)})",
        "k": params.k,
        "q": params.q,
        "A": list(params.A),
        "B": list(params.B),
        "r": params.r,
        "r_alternative": params.r_alternative,
        "n_left": sides["points"]["enumerated"],
        "n_right": sides["lines"]["enumerated"],
        "d_left": len(params.B),
        "d_right": len(params.A),
        "counts": sides,
        "notes": notes,
    }
