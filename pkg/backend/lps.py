# -*- coding: utf-8 -*-
"""
lps.py - Bipartite LPS Ramanujan graphs as (p+1,p+1)-biregular oracles.

For primes p, q = 1 mod 4 with q not a square mod p, the p+1 integer
quaternions a + bi + cj + dk of norm p (a odd and positive, b, c, d even)
become 2x2 matrices over Z_q through a square root of -1 mod q. Left
multiplication by these matrices on PGL(2,q) gives a graph that swaps the
square-determinant half of the group with the non-square half, so it is
bipartite with q(q^2-1)/2 vertices on each side, second eigenvalue at most
2*sqrt(p) and girth at least 4*log_p(q).

Usage:
    >>> params = LpsParams.build(5, 13)
    >>> graph = LpsGraph(params)
    >>> graph.n_left, graph.d_left
    (1092, 6)
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from sympy import isprime, legendre_symbol, primitive_root

from errors import ParameterError
from field_arith import check_prime
from graphs import LEFT, RIGHT, ExplicitBipartiteGraph

Matrix = tuple[int, int, int, int]  # (a, b, c, d) for [[a, b], [c, d]]


# ── Parameter search ───────────────────────────────────────────────────────

def lps_residue_class(p: int) -> tuple[int, int]:
    """(g, class) with g the least primitive root mod p and class = p + (3p+1)g mod 4p."""
    check_prime(p)
    if p % 4 != 1:
        raise ParameterError(f"p must be 1 mod 4, got {p}")
    g = int(primitive_root(p))
    return g, (p + (3 * p + 1) * g) % (4 * p)


def find_lps_q(p: int, min_q: int) -> int:
    """Smallest prime q >= min_q in the class p + (3p+1)g mod 4p.

    Every q in that class is 1 mod 4 and a primitive root (hence a
    non-residue) mod p; both facts are re-checked on the result.
    """
    g, cls = lps_residue_class(p)
    start = max(min_q, math.isqrt(4 * p) + 1)
    q = start + (cls - start) % (4 * p)
    while not isprime(q):
        q += 4 * p
    if q % 4 != 1 or legendre_symbol(q % p, p) != -1:
        raise RuntimeError(f"residue class search returned q={q} failing the LPS congruences")
    return q


def validate_lps_pair(p: int, q: int) -> None:
    """Raise ParameterError unless (p, q) satisfy the bipartite LPS conditions."""
    check_prime(p)
    check_prime(q)
    if p % 4 != 1 or q % 4 != 1:
        raise ParameterError(f"p and q must both be 1 mod 4, got p={p}, q={q}")
    if p == q or legendre_symbol(q % p, p) != -1:
        raise ParameterError(f"q={q} must be a non-residue mod p={p}")
    if q <= 2 * math.sqrt(p):
        raise ParameterError(f"q={q} must exceed 2*sqrt(p)")


def four_square_solutions(p: int) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, d) with a^2+b^2+c^2+d^2 = p, a odd positive, b, c, d even."""
    s = math.isqrt(p)
    sols = []
    for a, b, c, d in itertools.product(range(-s, s + 1), repeat=4):
        if a > 0 and a % 2 == 1 and b % 2 == 0 and c % 2 == 0 and d % 2 == 0 \
                and a * a + b * b + c * c + d * d == p:
            sols.append((a, b, c, d))
    return sols


# ── Projective matrices ────────────────────────────────────────────────────

def canonical(m: Matrix, q: int) -> Matrix:
    """Scale m so its first nonzero entry is 1."""
    for x in m:
        if x % q:
            s = pow(x, -1, q)
            return tuple((y * s) % q for y in m)  # type: ignore[return-value]
    raise ParameterError("zero matrix has no projective class")


def mat_mul(x: Matrix, y: Matrix, q: int) -> Matrix:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)


def det(m: Matrix, q: int) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % q


@dataclass(frozen=True)
class LpsParams:
    """Validated (p, q) with the generator set and the search trace."""

    p: int
    q: int
    sqrt_minus_one: int
    non_residue: int
    generators: tuple[Matrix, ...]
    quaternions: tuple[tuple[int, int, int, int], ...]
    inverse_slot: tuple[int, ...]
    trace: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, p: int, q: int) -> LpsParams:
        validate_lps_pair(p, q)
        z = 2
        while legendre_symbol(z, q) != -1:
            z += 1
        i = pow(z, (q - 1) // 4, q)
        quats = four_square_solutions(p)
        gens = tuple(lps_generator(quat, i, q) for quat in quats)
        if len(gens) != p + 1 or len(set(gens)) != p + 1:
            raise RuntimeError(f"expected {p + 1} distinct generators, got {len(set(gens))}")
        # the conjugate quaternion is the projective inverse
        position = {quat: s for s, quat in enumerate(quats)}
        inverse_slot = tuple(position[(a, -b, -c, -d)] for a, b, c, d in quats)
        g, residue = lps_residue_class(p)
        trace = {"primitive_root": g, "residue_class": residue, "modulus": 4 * p,
                 "non_residue": z, "sqrt_minus_one": i}
        return cls(p, q, i, z, gens, tuple(quats), inverse_slot, trace)


def lps_generator(quat: tuple[int, int, int, int], i: int, q: int) -> Matrix:
    """[[a + ib, c + id], [-c + id, a - ib]] in canonical projective form."""
    a, b, c, d = quat
    return canonical(((a + i * b) % q, (c + i * d) % q, (-c + i * d) % q, (a - i * b) % q), q)


def lps_generators(p: int, q: int) -> list[Matrix]:
    """The p+1 projective generator matrices for (p, q)."""
    return list(LpsParams.build(p, q).generators)


# ── The graph ──────────────────────────────────────────────────────────────

class LpsGraph(ExplicitBipartiteGraph):
    """Bipartite Cayley graph of PGL(2,q) for the LPS generators.

    Left vertices are the square-determinant classes, right vertices the
    non-square ones, each numbered by the lexicographic order of canonical
    representatives. Slot s applies generator s; the co-slot is the slot of
    its inverse.
    """

    def __init__(self, params: LpsParams) -> None:
        self.params = params
        self.p, self.q = params.p, params.q
        self.n_left = self.n_right = self.q * (self.q * self.q - 1) // 2
        self.d_left = self.d_right = self.p + 1
        self.name = f"LPS({self.p},{self.q})"

    @cached_property
    def _tables(self) -> tuple[list[list[Matrix]], dict[Matrix, tuple[int, int]]]:
        q = self.q
        sides: list[list[Matrix]] = [[], []]
        index: dict[Matrix, tuple[int, int]] = {}
        for m in itertools.product(range(q), repeat=4):
            if det(m, q) == 0 or canonical(m, q) != m:
                continue
            side = LEFT if legendre_symbol(det(m, q), q) == 1 else RIGHT
            index[m] = (side, len(sides[side]))
            sides[side].append(m)
        if len(sides[LEFT]) != self.n_left or len(sides[RIGHT]) != self.n_right:
            raise RuntimeError("projective group enumeration has the wrong size")
        return sides, index

    def element(self, side: int, vertex: int) -> Matrix:
        return self._tables[0][side][vertex]

    def vertex_of(self, m: Matrix) -> tuple[int, int]:
        """(side, index) of a matrix's projective class."""
        return self._tables[1][canonical(m, self.q)]

    def neighbor(self, side: int, vertex: int, slot: int) -> tuple[int, int]:
        if not 0 <= slot < self.d_left:
            raise ParameterError(f"slot {slot} out of range 0..{self.d_left - 1}")
        m = mat_mul(self.params.generators[slot], self.element(side, vertex), self.q)
        other, w = self.vertex_of(m)
        if other == side:
            raise RuntimeError("generator did not switch the determinant class")
        return w, self.params.inverse_slot[slot]

    def is_connected(self) -> bool:
        """BFS over the oracle from left vertex 0."""
        seen = [set([0]), set()]
        queue = deque([(LEFT, 0)])
        while queue:
            side, v = queue.popleft()
            for s in range(self.d_left):
                w, _ = self.neighbor(side, v, s)
                other = 1 - side
                if w not in seen[other]:
                    seen[other].add(w)
                    queue.append((other, w))
        return len(seen[LEFT]) == self.n_left and len(seen[RIGHT]) == self.n_right

    def describe(self) -> dict:
        info = super().describe()
        info.update({
            "kind": "lps",
            "p": self.p,
            "q": self.q,
            "generators": [list(g) for g in self.params.generators],
            "search": self.params.trace,
            "girth_lower_bound": 4 * math.log(self.q) / math.log(self.p),
            "spectral_bound": 2 * math.sqrt(self.p),
        })
        return info


def lps_graph(params: LpsParams) -> LpsGraph:
    return LpsGraph(params)
