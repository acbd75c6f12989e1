"""Exact rational matrices and monomial (generalized permutation) matrices.

Dense matrices are plain lists of rows of ``Fraction``; vectors are lists.
A monomial matrix is stored sparsely as a permutation plus one positive
coefficient per row: row ``i`` holds ``coeffs[i]`` at column ``perm[i]``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise TypeError("floats are not accepted; pass ints, Fractions or 'p/q' strings")
    return Fraction(v)


def vector(values: Sequence) -> Vector:
    return [to_fraction(v) for v in values]


def matrix(rows: Sequence[Sequence]) -> Matrix:
    out = [vector(r) for r in rows]
    if not out or any(len(r) != len(out[0]) for r in out) or not out[0]:
        raise ValueError("matrix must be non-empty and rectangular")
    return out


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), len(a[0])


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a[0]) != len(b):
        raise ValueError(f"cannot multiply {shape(a)} by {shape(b)}")
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def matvec(a: Matrix, v: Vector) -> Vector:
    if len(a[0]) != len(v):
        raise ValueError("dimension mismatch")
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("dimension mismatch")
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("dimension mismatch")
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def vadd(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return [x + y for x, y in zip(u, v)]


def vsub(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return [x - y for x, y in zip(u, v)]


def column(v: Vector) -> Matrix:
    return [[x] for x in v]


def row(v: Vector) -> Matrix:
    return [list(v)]


def transpose(a: Matrix) -> Matrix:
    return [list(c) for c in zip(*a)]


@dataclass(frozen=True)
class MonomialMatrix:
    """Square matrix with exactly one positive entry per row and column."""

    perm: tuple[int, ...]
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        coeffs = tuple(to_fraction(q) for q in self.coeffs)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        if len(coeffs) != len(perm):
            raise ValueError("need one coefficient per row")
        if not perm:
            raise ValueError("dimension must be at least 1")
        if any(q <= 0 for q in coeffs):
            raise ValueError("monomial coefficients must be strictly positive")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return len(self.perm)

    @property
    def is_integral(self) -> bool:
        return all(q.denominator == 1 for q in self.coeffs)

    @classmethod
    def identity(cls, n: int) -> MonomialMatrix:
        return cls(tuple(range(n)), (1,) * n)

    def dense(self) -> Matrix:
        out = zeros(self.dim, self.dim)
        for i, (j, q) in enumerate(zip(self.perm, self.coeffs)):
            out[i][j] = q
        return out

    def __matmul__(self, other: MonomialMatrix) -> MonomialMatrix:
        return compose(self, other)


def gen_monomial(n: int, coeff_range: tuple[int, int], rng: random.Random) -> MonomialMatrix:
    lo, hi = coeff_range
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if not 1 <= lo <= hi:
        raise ValueError(f"invalid coefficient range [{lo}, {hi}]")
    perm = list(range(n))
    rng.shuffle(perm)
    return MonomialMatrix(tuple(perm), tuple(rng.randint(lo, hi) for _ in range(n)))


def _check_dim(q: MonomialMatrix, n: int) -> None:
    if q.dim != n:
        raise ValueError(f"dimension mismatch: monomial is {q.dim}x{q.dim}, operand has {n}")


def right_apply(a: Matrix, q: MonomialMatrix) -> Matrix:
    """Return ``a @ q``: column ``perm[i]`` of the result is ``coeffs[i]`` times column ``i`` of ``a``."""
    _check_dim(q, len(a[0]))
    out = [[Fraction(0)] * q.dim for _ in a]
    for i, (j, c) in enumerate(zip(q.perm, q.coeffs)):
        for r, src in zip(out, a):
            r[j] = c * src[i]
    return out


def row_apply(v: Vector, q: MonomialMatrix) -> Vector:
    """Row vector times ``q`` (``c^T Q``)."""
    return right_apply([list(v)], q)[0]


def apply_vec(q: MonomialMatrix, y: Vector) -> Vector:
    """``q @ y`` for a column vector: entry ``i`` is ``coeffs[i] * y[perm[i]]``."""
    _check_dim(q, len(y))
    return [c * to_fraction(y[j]) for j, c in zip(q.perm, q.coeffs)]


def compose(qa: MonomialMatrix, qb: MonomialMatrix) -> MonomialMatrix:
    """Matrix product ``qa @ qb``."""
    _check_dim(qb, qa.dim)
    perm = tuple(qb.perm[j] for j in qa.perm)
    coeffs = tuple(c * qb.coeffs[j] for j, c in zip(qa.perm, qa.coeffs))
    return MonomialMatrix(perm, coeffs)


def compose_all(qs: Sequence[MonomialMatrix]) -> MonomialMatrix:
    if not qs:
        raise ValueError("empty chain")
    out = qs[0]
    for q in qs[1:]:
        out = compose(out, q)
    return out


def invert(q: MonomialMatrix) -> MonomialMatrix:
    perm = [0] * q.dim
    coeffs = [Fraction(0)] * q.dim
    for i, (j, c) in enumerate(zip(q.perm, q.coeffs)):
        perm[j] = i
        coeffs[j] = 1 / c
    return MonomialMatrix(tuple(perm), tuple(coeffs))
