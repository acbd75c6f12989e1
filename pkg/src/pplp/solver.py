"""Exact rational two-phase simplex with Bland's rule.

Problems are solved in the canonical form

    minimize c.x  subject to  M x <= b,  x >= 0

with ``Fraction`` arithmetic throughout, so optimal objectives are exact
and runs are fully deterministic.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from pplp.linalg import Matrix, Vector, dot, matrix, vector


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LpProblem:
    """Canonical LP. ``objective_sign`` is -1 when built from a maximization."""

    c: Vector
    M: Matrix
    b: Vector
    objective_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c", vector(self.c))
        object.__setattr__(self, "M", matrix(self.M))
        object.__setattr__(self, "b", vector(self.b))
        if len(self.c) != len(self.M[0]):
            raise ValueError(f"objective has {len(self.c)} entries, matrix has {len(self.M[0])} columns")
        if len(self.b) != len(self.M):
            raise ValueError(f"rhs has {len(self.b)} entries, matrix has {len(self.M)} rows")

    @property
    def m(self) -> int:
        return len(self.M)

    @property
    def n(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class RawProblem:
    """LP as written by a user: mixed relations and either sense."""

    c: Vector
    M: Matrix
    relations: tuple[str, ...]
    b: Vector
    sense: str = "min"


@dataclass(frozen=True)
class LpSolution:
    status: Status
    x: Vector | None = None
    objective: Fraction | None = None


@dataclass
class FeasibilityReport:
    slack: Vector
    row_violations: list[int]
    negative_indices: list[int]
    objective: Fraction
    feasible: bool = field(init=False)

    def __post_init__(self):
        self.feasible = not self.row_violations and not self.negative_indices


def canonicalize(raw: RawProblem) -> LpProblem:
    M = matrix(raw.M)
    b = vector(raw.b)
    c = vector(raw.c)
    if len(raw.relations) != len(M) or len(b) != len(M):
        raise ValueError("relations, rows and rhs must have equal length")
    rows, rhs = [], []
    for r, rel, bi in zip(M, raw.relations, b):
        if rel == "<=":
            rows.append(r)
            rhs.append(bi)
        elif rel == ">=":
            rows.append([-v for v in r])
            rhs.append(-bi)
        else:
            raise ValueError(f"unknown relation {rel!r}")
    if raw.sense == "min":
        return LpProblem(c, rows, rhs)
    if raw.sense == "max":
        return LpProblem([-v for v in c], rows, rhs, objective_sign=-1)
    raise ValueError(f"unknown sense {raw.sense!r}")


def report_objective(p: LpProblem, sol: LpSolution) -> Fraction | None:
    """Objective in the user's original sense."""
    if sol.objective is None:
        return None
    return p.objective_sign * sol.objective


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows          # each row: coefficients..., rhs
        self.basis = basis

    def pivot(self, r: int, j: int, obj: list[Fraction]) -> None:
        prow = self.rows[r]
        piv = prow[j]
        prow[:] = [v / piv for v in prow]
        for other in self.rows + [obj]:
            if other is prow:
                continue
            f = other[j]
            if f:
                other[:] = [a - f * b for a, b in zip(other, prow)]
        self.basis[r] = j

    def run(self, obj: list[Fraction], allowed: int) -> bool:
        """Minimize with Bland's rule over columns < ``allowed``. False if unbounded."""
        while True:
            entering = next((j for j in range(allowed) if obj[j] < 0), None)
            if entering is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], entering, obj)


def _reduced(cost: Sequence[Fraction], t: _Tableau) -> list[Fraction]:
    obj = list(cost) + [Fraction(0)]
    for r, j in enumerate(t.basis):
        f = obj[j]
        if f:
            obj = [a - f * b for a, b in zip(obj, t.rows[r])]
    return obj


def simplex_solve(p: LpProblem) -> LpSolution:
    m, n = p.m, p.n
    n_art = sum(1 for bi in p.b if bi < 0)
    width = n + m + n_art
    rows, basis = [], []
    k = n + m
    for i, (r, bi) in enumerate(zip(p.M, p.b)):
        row = [Fraction(0)] * (width + 1)
        sign = -1 if bi < 0 else 1
        for j, v in enumerate(r):
            row[j] = sign * v
        row[n + i] = Fraction(sign)
        row[-1] = sign * bi
        if bi < 0:
            row[k] = Fraction(1)
            basis.append(k)
            k += 1
        else:
            basis.append(n + i)
        rows.append(row)
    t = _Tableau(rows, basis)

    if n_art:
        phase1 = [Fraction(0)] * (n + m) + [Fraction(1)] * n_art
        obj = _reduced(phase1, t)
        t.run(obj, width)
        if obj[-1] != 0:   # obj[-1] holds minus the phase-one optimum
            return LpSolution(Status.INFEASIBLE)
        # drive zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(t.rows):
            if t.basis[r] >= n + m:
                j = next((j for j in range(n + m) if t.rows[r][j] != 0), None)
                if j is None:
                    del t.rows[r]
                    del t.basis[r]
                    continue
                t.pivot(r, j, obj)
            r += 1
        t.rows = [row[:n + m] + [row[-1]] for row in t.rows]

    cost = list(p.c) + [Fraction(0)] * m
    obj = _reduced(cost, t)
    if not t.run(obj, n + m):
        return LpSolution(Status.UNBOUNDED)
    x = [Fraction(0)] * n
    for r, j in enumerate(t.basis):
        if j < n:
            x[j] = t.rows[r][-1]
    return LpSolution(Status.OPTIMAL, x, dot(p.c, x))


def verify_solution(p: LpProblem, x: Sequence) -> FeasibilityReport:
    x = vector(x)
    if len(x) != p.n:
        raise ValueError("dimension mismatch")
    slack = [bi - dot(r, x) for r, bi in zip(p.M, p.b)]
    return FeasibilityReport(
        slack=slack,
        row_violations=[i for i, s in enumerate(slack) if s < 0],
        negative_indices=[i for i, v in enumerate(x) if v < 0],
        objective=dot(p.c, x),
    )
