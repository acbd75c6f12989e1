import random
from fractions import Fraction

import pytest

from oracles import brute_force_lp
from pplp.instances import random_lp, textbook_problem, transform
from pplp.linalg import apply_vec, gen_monomial
from pplp.solver import (LpProblem, RawProblem, Status, canonicalize, report_objective, simplex_solve,
                         verify_solution)

# classic cycling example: Dantzig's largest-coefficient rule loops forever on it
BEALE = LpProblem(
    [Fraction(-3, 4), 20, Fraction(-1, 2), 6],
    [[Fraction(1, 4), -8, -1, 9], [Fraction(1, 2), -12, Fraction(-1, 2), 3], [0, 0, 1, 0]],
    [0, 0, 1],
)


def test_textbook_example():
    p = textbook_problem()
    assert brute_force_lp(p.c, p.M, p.b) == ("Optimal", -36)
    sol = simplex_solve(p)
    assert sol.status is Status.OPTIMAL
    assert sol.x == [2, 6]
    assert sol.objective == -36


def test_box_example():
    p = LpProblem([-1, -1], [[1, 0], [0, 1]], [2, 3])
    assert brute_force_lp(p.c, p.M, p.b) == ("Optimal", -5)
    sol = simplex_solve(p)
    assert (sol.status, sol.x, sol.objective) == (Status.OPTIMAL, [2, 3], -5)


def test_unbounded_example():
    sol = simplex_solve(LpProblem([-1], [[-1]], [-1]))
    assert sol.status is Status.UNBOUNDED
    assert sol.x is None and sol.objective is None


def test_infeasible_example():
    sol = simplex_solve(LpProblem([1, 1], [[1, 1], [-1, -1]], [1, -2]))
    assert sol.status is Status.INFEASIBLE


def test_beale_cycling_instance_terminates():
    assert brute_force_lp(BEALE.c, BEALE.M, BEALE.b) == ("Optimal", Fraction(-5, 4))
    sol = simplex_solve(BEALE)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == Fraction(-5, 4)
    assert verify_solution(BEALE, sol.x).feasible


def test_redundant_equalities_via_negative_rhs():
    # x1 + x2 = 2 written as two inequalities, plus a duplicate row
    p = LpProblem([1, 2], [[1, 1], [-1, -1], [-1, -1]], [2, -2, -2])
    sol = simplex_solve(p)
    assert (sol.status, sol.objective) == (Status.OPTIMAL, 2)


def test_deterministic():
    p = random_lp(random.Random(3), 5, 5, denom=3)
    assert simplex_solve(p) == simplex_solve(p)


def test_canonicalize_negates_ge_rows():
    p = canonicalize(RawProblem([1, 1], [[1, 1]], (">=",), [3]))
    assert p.M == [[-1, -1]] and p.b == [-3]


def test_canonicalize_keeps_canonical_input():
    raw = RawProblem([1, 2], [[1, 0], [0, 1]], ("<=", "<="), [4, 5])
    p = canonicalize(raw)
    assert (p.c, p.M, p.b, p.objective_sign) == ([1, 2], [[1, 0], [0, 1]], [4, 5], 1)


def test_canonicalize_max_restores_sign():
    raw = RawProblem([3, 5], [[1, 0], [0, 2], [3, 2]], ("<=",) * 3, [4, 12, 18], "max")
    p = canonicalize(raw)
    assert p.c == [-3, -5] and p.objective_sign == -1
    assert report_objective(p, simplex_solve(p)) == 36


def test_canonicalize_rejects_inconsistent_dimensions():
    with pytest.raises(ValueError):
        canonicalize(RawProblem([1], [[1], [2]], ("<=",), [1, 2]))
    with pytest.raises(ValueError):
        canonicalize(RawProblem([1], [[1]], ("=",), [1]))


def test_problem_dimension_validation():
    with pytest.raises(ValueError):
        LpProblem([1, 2], [[1]], [1])
    with pytest.raises(ValueError):
        LpProblem([1], [[1]], [1, 2])


def test_verify_solution_reports():
    p = textbook_problem()
    rep = verify_solution(p, simplex_solve(p).x)
    assert rep.feasible and not rep.row_violations and not rep.negative_indices
    assert rep.objective == -36
    # rows 2 and 3 bind at (2, 6); row 1 has slack 2
    assert rep.slack == [2, 0, 0]
    bad = verify_solution(p, [-1, 0])
    assert bad.negative_indices == [0] and not bad.feasible
    over = verify_solution(p, [5, 0])
    assert over.row_violations == [0]


def test_oracle_agreement_random():
    rng = random.Random(2024)
    for _ in range(150):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        p = random_lp(rng, m, n, denom=rng.choice([1, 2, 3]), bounded=rng.random() < 0.7)
        status, objective = brute_force_lp(p.c, p.M, p.b)
        sol = simplex_solve(p)
        assert sol.status.value == status
        assert sol.objective == objective
        if status == "Optimal":
            assert verify_solution(p, sol.x).feasible


def test_oracle_agreement_infeasible_mix():
    rng = random.Random(77)
    seen = set()
    for _ in range(150):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        M = [[Fraction(rng.randint(-5, 5)) for _ in range(n)] for _ in range(m)]
        b = [Fraction(rng.randint(-6, 6)) for _ in range(m)]
        c = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
        status, objective = brute_force_lp(c, M, b)
        sol = simplex_solve(LpProblem(c, M, b))
        seen.add(status)
        assert (sol.status.value, sol.objective) == (status, objective)
    assert seen == {"Optimal", "Infeasible", "Unbounded"}


def test_transformation_equivalence():
    rng = random.Random(8)
    for _ in range(60):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        p = random_lp(rng, m, n, denom=4)
        q = gen_monomial(n, (1, 2 ** 16), rng)
        ref, tr = simplex_solve(p), simplex_solve(transform(p, q))
        assert tr.status is ref.status
        assert tr.objective == ref.objective
        x = apply_vec(q, tr.x)
        rep = verify_solution(p, x)
        assert rep.feasible and rep.objective == ref.objective


def test_status_fidelity_under_transformation():
    q = gen_monomial(2, (1, 100), random.Random(0))
    unbounded = LpProblem([-1, 0], [[-1, 0]], [-1])
    infeasible = LpProblem([1, 1], [[1, 1], [-1, -1]], [1, -2])
    assert simplex_solve(transform(unbounded, q)).status is Status.UNBOUNDED
    assert simplex_solve(transform(infeasible, q)).status is Status.INFEASIBLE
