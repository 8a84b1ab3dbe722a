# -*- coding: utf-8 -*-
"""
field_arith.py - Exact arithmetic in Z_q and in Z_q[x]/(x^(r+1)).

FieldElem is a checked, immutable element of the prime field Z_q.
TruncPoly is a polynomial truncated after degree r; the index bijections
of the CD(k,q,A,B) construction multiply and invert these.

Hot loops elsewhere (the D(k,q) incidence solver) work on plain residues
and call tick() so that count_field_ops() still sees every operation.

Examples:
    >>> FieldElem(3, 7).inv()
    FieldElem(value=5, modulus=7)
    >>> poly_inverse(TruncPoly.from_values([1, 1, 0], 7)).coeffs
    (1, 6, 1)
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from sympy import isprime

from errors import ModulusMismatch, NotInvertible, ParameterError

_OP_COUNTER: ContextVar[list[int] | None] = ContextVar("forge_field_ops", default=None)


@lru_cache(maxsize=256)
def check_prime(q: int) -> int:
    """Return q if it is prime, raise ParameterError otherwise."""
    if not isinstance(q, int) or q < 2 or not isprime(q):
        raise ParameterError(f"modulus must be prime, got {q!r}")
    return q


# ── Operation counting ─────────────────────────────────────────────────────

def tick(n: int = 1) -> None:
    """Record n field operations in the active counter, if any."""
    box = _OP_COUNTER.get()
    if box is not None:
        box[0] += n


@contextmanager
def count_field_ops() -> Iterator[list[int]]:
    """Count field operations performed inside the block.

    Yields a one-element list whose entry holds the running count.

    Example:
        with count_field_ops() as ops:
            cd.neighbor(LEFT, 0, 1)
        print(ops[0])
    """
    box = [0]
    token = _OP_COUNTER.set(box)
    try:
        yield box
    finally:
        _OP_COUNTER.reset(token)


# ── Z_q ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class FieldElem:
    """Element of Z_q for a prime q."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        check_prime(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise ParameterError(f"{self.value} not in range [0, {self.modulus})")

    @classmethod
    def of(cls, value: int, modulus: int) -> FieldElem:
        """Reduce an arbitrary integer into Z_q."""
        return cls(value % modulus, modulus)

    def _same(self, other: FieldElem) -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"moduli differ: {self.modulus} vs {other.modulus}")

    def __add__(self, other: FieldElem) -> FieldElem:
        self._same(other)
        tick()
        return FieldElem((self.value + other.value) % self.modulus, self.modulus)

    def __sub__(self, other: FieldElem) -> FieldElem:
        self._same(other)
        tick()
        return FieldElem((self.value - other.value) % self.modulus, self.modulus)

    def __mul__(self, other: FieldElem) -> FieldElem:
        self._same(other)
        tick()
        return FieldElem((self.value * other.value) % self.modulus, self.modulus)

    def __neg__(self) -> FieldElem:
        tick()
        return FieldElem((-self.value) % self.modulus, self.modulus)

    def inv(self) -> FieldElem:
        if self.value == 0:
            raise NotInvertible(f"0 has no inverse mod {self.modulus}")
        tick()
        return FieldElem(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other: FieldElem) -> FieldElem:
        return self * other.inv()

    def __int__(self) -> int:
        return self.value


def add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def sub(a: FieldElem, b: FieldElem) -> FieldElem:
    return a - b


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def neg(a: FieldElem) -> FieldElem:
    return -a


def inv(a: FieldElem) -> FieldElem:
    return a.inv()


# ── Z_q[x]/(x^(r+1)) ───────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class TruncPoly:
    """Polynomial over Z_q truncated after degree r.

    ``coeffs[i]`` is the residue of the x^i coefficient; there are always
    exactly r+1 of them.
    """

    coeffs: tuple[int, ...]
    modulus: int
    r: int

    def __post_init__(self) -> None:
        check_prime(self.modulus)
        if self.r < 0 or len(self.coeffs) != self.r + 1:
            raise ParameterError(f"need {self.r + 1} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < self.modulus for c in self.coeffs):
            raise ParameterError(f"coefficients must be residues mod {self.modulus}")

    @classmethod
    def from_values(cls, values: Iterable[int | FieldElem], modulus: int, r: int | None = None) -> TruncPoly:
        """Build from integers or FieldElems, padding or truncating to degree r."""
        vals = []
        for v in values:
            if isinstance(v, FieldElem):
                if v.modulus != modulus:
                    raise ModulusMismatch(f"moduli differ: {v.modulus} vs {modulus}")
                v = v.value
            vals.append(v % modulus)
        if r is None:
            r = len(vals) - 1
        vals = (vals + [0] * (r + 1))[: r + 1]
        return cls(tuple(vals), modulus, r)

    @classmethod
    def one(cls, modulus: int, r: int) -> TruncPoly:
        return cls((1,) + (0,) * r, modulus, r)

    @classmethod
    def zero(cls, modulus: int, r: int) -> TruncPoly:
        return cls((0,) * (r + 1), modulus, r)

    def elements(self) -> list[FieldElem]:
        return [FieldElem(c, self.modulus) for c in self.coeffs]

    def __mul__(self, other: TruncPoly) -> TruncPoly:
        return poly_mul(self, other)

    def __add__(self, other: TruncPoly) -> TruncPoly:
        return poly_add(self, other)

    def __sub__(self, other: TruncPoly) -> TruncPoly:
        return poly_sub(self, other)


def _check_pair(a: TruncPoly, b: TruncPoly) -> None:
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"moduli differ: {a.modulus} vs {b.modulus}")
    if a.r != b.r:
        raise ParameterError(f"truncation degrees differ: {a.r} vs {b.r}")


def poly_add(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    _check_pair(a, b)
    q = a.modulus
    tick(a.r + 1)
    return TruncPoly(tuple((x + y) % q for x, y in zip(a.coeffs, b.coeffs)), q, a.r)


def poly_sub(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    _check_pair(a, b)
    q = a.modulus
    tick(a.r + 1)
    return TruncPoly(tuple((x - y) % q for x, y in zip(a.coeffs, b.coeffs)), q, a.r)


def poly_mul(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    """Product of a and b with every term above x^r dropped."""
    _check_pair(a, b)
    q, r = a.modulus, a.r
    out = [0] * (r + 1)
    ops = 0
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j in range(r + 1 - i):
            out[i + j] += ai * b.coeffs[j]
            ops += 2
    tick(ops)
    return TruncPoly(tuple(c % q for c in out), q, r)


def poly_inverse(a: TruncPoly) -> TruncPoly:
    """Inverse of a in Z_q[x]/(x^(r+1)).

    Solves a*b = 1 coefficient by coefficient:
    b_0 = a_0^-1 and b_n = -a_0^-1 * sum(a_i * b_(n-i), i = 1..n).

    Raises:
        NotInvertible: if the constant term is zero.
    """
    q, r = a.modulus, a.r
    if a.coeffs[0] == 0:
        raise NotInvertible("constant term is zero; polynomial is not a unit")
    inv0 = pow(a.coeffs[0], -1, q)
    b = [inv0] + [0] * r
    ops = 1
    for n in range(1, r + 1):
        acc = 0
        for i in range(1, n + 1):
            acc += a.coeffs[i] * b[n - i]
        ops += 2 * n + 1
        b[n] = (-acc * inv0) % q
    tick(ops)
    return TruncPoly(tuple(b), q, r)


def poly_shift_down(a: TruncPoly, s: int, r: int | None = None) -> TruncPoly:
    """Divide by x^s, keeping the result truncated after degree r.

    The low s coefficients must be zero.
    """
    if any(a.coeffs[:s]):
        raise ParameterError(f"polynomial is not divisible by x^{s}")
    if r is None:
        r = a.r - s
    return TruncPoly.from_values(a.coeffs[s:], a.modulus, r)


def poly_resize(a: TruncPoly, r: int) -> TruncPoly:
    """Same polynomial viewed modulo x^(r+1), padded with zeros if needed."""
    return TruncPoly.from_values(a.coeffs, a.modulus, r)
