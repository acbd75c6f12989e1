"""Random LP instances and additive partitions for tests, demos and benchmarks."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from pplp.linalg import Matrix, MonomialMatrix, apply_vec, gen_monomial, matvec, row_apply, right_apply
from pplp.protocols.common import PartyShare
from pplp.solver import LpProblem, Status, simplex_solve


def textbook_problem() -> LpProblem:
    """min -3x1 - 5x2 s.t. x1 <= 4, 2x2 <= 12, 3x1 + 2x2 <= 18 (optimum -36 at (2, 6))."""
    return LpProblem([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])


def _grid(rng: random.Random, lo: int, hi: int, denom: int) -> Fraction:
    return Fraction(rng.randint(lo * denom, hi * denom), denom)


def random_lp(rng: random.Random, m: int, n: int, denom: int = 1, magnitude: int = 9,
              bounded: bool = True) -> LpProblem:
    """Random LP with ``b >= 0`` (so x = 0 is feasible) and entries on the 1/denom grid.

    With ``bounded`` the last row has strictly positive coefficients, which
    caps every variable and rules out unboundedness.
    """
    M = [[_grid(rng, -magnitude, magnitude, denom) for _ in range(n)] for _ in range(m)]
    if bounded:
        M[-1] = [Fraction(rng.randint(denom, magnitude * denom), denom) for _ in range(n)]
    b = [_grid(rng, 0, magnitude, denom) for _ in range(m)]
    if bounded:
        b[-1] = Fraction(rng.randint(denom, magnitude * denom), denom)
    c = [_grid(rng, -magnitude, magnitude, denom) for _ in range(n)]
    return LpProblem(c, M, b)


def transform(p: LpProblem, q: MonomialMatrix) -> LpProblem:
    """The disguised problem ``min (c^T Q) y s.t. (M Q) y <= b, y >= 0``."""
    return LpProblem(row_apply(p.c, q), right_apply(p.M, q), p.b)


def split_problem(p: LpProblem, parts: int, rng: random.Random, denom: int = 1,
                  magnitude: int = 9) -> list[PartyShare]:
    """Arbitrary additive partition: random shares for all but the last party, which takes the remainder."""
    if parts < 1:
        raise ValueError("need at least one share")
    m, n = len(p.M), len(p.c)
    shares = []
    rest_M = [list(r) for r in p.M]
    rest_c, rest_b = list(p.c), list(p.b)
    for _ in range(parts - 1):
        M = [[_grid(rng, -magnitude, magnitude, denom) for _ in range(n)] for _ in range(m)]
        c = [_grid(rng, -magnitude, magnitude, denom) for _ in range(n)]
        b = [_grid(rng, -magnitude, magnitude, denom) for _ in range(m)]
        rest_M = [[x - y for x, y in zip(u, v)] for u, v in zip(rest_M, M)]
        rest_c = [x - y for x, y in zip(rest_c, c)]
        rest_b = [x - y for x, y in zip(rest_b, b)]
        shares.append(PartyShare(M, c, b))
    shares.append(PartyShare(rest_M, rest_c, rest_b))
    return shares


def combine(shares) -> LpProblem:
    """The global problem whose data is the elementwise sum of the shares."""
    M = [[sum(col, Fraction(0)) for col in zip(*rows)] for rows in zip(*(s.M for s in shares))]
    c = [sum(v, Fraction(0)) for v in zip(*(s.c for s in shares))]
    b = [sum(v, Fraction(0)) for v in zip(*(s.b for s in shares))]
    return LpProblem(c, M, b)


def _vertices(p: LpProblem):
    """All basic feasible points, by brute force over tight constraint sets."""
    m, n = len(p.M), len(p.c)
    rows = [list(r) + [b] for r, b in zip(p.M, p.b)]
    rows += [[Fraction(int(i == j)) for j in range(n)] + [Fraction(0)] for i in range(n)]
    for tight in itertools.combinations(range(m + n), n):
        x = _solve_square([rows[k] for k in tight], n)
        if x is None:
            continue
        if all(v >= 0 for v in x) and all(a <= bb for a, bb in zip(matvec(p.M, x), p.b)):
            yield x


def _solve_square(aug: Matrix, n: int):
    a = [list(r) for r in aug]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def has_unique_optimum(p: LpProblem) -> bool:
    sol = simplex_solve(p)
    if sol.status is not Status.OPTIMAL:
        return False
    best = {tuple(x) for x in _vertices(p)
            if sum((ci * xi for ci, xi in zip(p.c, x)), Fraction(0)) == sol.objective}
    return len(best) == 1


def generic_attack_instance(rng: random.Random, n: int = 4, m: int | None = None,
                            coeff_range: tuple[int, int] = (1, 2 ** 16),
                            max_tries: int = 1000) -> tuple[LpProblem, MonomialMatrix]:
    """Instance on which full disclosure pins the transformation down.

    Positive M and b with pairwise distinct negative c give a bounded problem
    whose objective entries are distinct and nonzero. The optimum must be
    unique, and at most one optimal coordinate may be zero: a zero x_i opposite
    a zero y_j leaves that coefficient unconstrained.
    """
    m = m if m is not None else n
    for _ in range(max_tries):
        c = [Fraction(-v) for v in rng.sample(range(1, 50), n)]
        M = [[Fraction(rng.randint(1, 9)) for _ in range(n)] for _ in range(m)]
        b = [Fraction(rng.randint(10, 60)) for _ in range(m)]
        p = LpProblem(c, M, b)
        if not has_unique_optimum(p):
            continue
        x = simplex_solve(p).x
        if sum(1 for v in x if v == 0) > 1:
            continue
        return p, gen_monomial(n, coeff_range, rng)
    raise RuntimeError("no generic instance found")


def disclosure(p: LpProblem, q: MonomialMatrix) -> dict[str, list[Fraction]]:
    """Everything a fully informed party sees: c, c^T Q, y* and x* = Q y*."""
    y = simplex_solve(transform(p, q)).x
    return {"cT": list(p.c), "cTQ": row_apply(p.c, q), "y_star": y, "x_star": apply_vec(q, y)}
