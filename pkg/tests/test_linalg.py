import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import dense_matmul, dense_matvec, monomial_dense
from pplp import linalg
from pplp.linalg import MonomialMatrix, apply_vec, compose, gen_monomial, invert, right_apply


def identity_dense(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def random_matrix(rng, m, n, denom=8):
    return [[Fraction(rng.randint(-50, 50), denom) for _ in range(n)] for _ in range(m)]


monomials = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.permutations(range(n)), st.lists(st.integers(1, 2 ** 16), min_size=n, max_size=n))).map(
    lambda t: MonomialMatrix(tuple(t[0]), tuple(t[1])))


def test_gen_monomial_forced_case():
    q = gen_monomial(1, (1, 1), random.Random(0))
    assert q.dense() == [[1]]


def test_gen_monomial_structure():
    rng = random.Random(0)
    for n in range(1, 8):
        dense = gen_monomial(n, (1, 2 ** 16), rng).dense()
        assert sum(1 for r in dense for v in r if v) == n
        assert all(sum(1 for v in r if v) == 1 for r in dense)
        assert all(sum(1 for r in dense if r[j]) == 1 for j in range(n))


def test_gen_monomial_unit_range_is_permutation():
    q = gen_monomial(5, (1, 1), random.Random(2))
    assert set(q.coeffs) == {1}
    assert sorted(q.perm) == list(range(5))


def test_gen_monomial_permutations_cover_group():
    rng = random.Random(1)
    seen = {gen_monomial(3, (1, 1), rng).perm for _ in range(400)}
    assert len(seen) == 6


@pytest.mark.parametrize("bad", [(0, 3), (5, 2), (-1, 1)])
def test_gen_monomial_rejects_bad_range(bad):
    with pytest.raises(ValueError):
        gen_monomial(3, bad, random.Random(0))


def test_monomial_rejects_nonpositive_and_nonpermutations():
    with pytest.raises(ValueError):
        MonomialMatrix((0, 1), (1, 0))
    with pytest.raises(ValueError):
        MonomialMatrix((0, 0), (1, 1))
    with pytest.raises(ValueError):
        MonomialMatrix((1, 0), (1, -2))


def test_right_apply_example():
    # swap permutation with coefficients (2, 3); reference value from a dense product
    q = MonomialMatrix((1, 0), (2, 3))
    m = [[1, 2], [3, 4]]
    expected = dense_matmul(m, monomial_dense(q.perm, q.coeffs))
    assert expected == [[6, 2], [12, 6]]
    assert right_apply(linalg.matrix(m), q) == expected


def test_right_apply_identity():
    m = random_matrix(random.Random(0), 3, 4)
    assert right_apply(m, MonomialMatrix.identity(4)) == m


def test_right_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        right_apply([[1, 2, 3]], MonomialMatrix.identity(2))


def test_right_apply_chain_matches_compose():
    rng = random.Random(5)
    for _ in range(50):
        m = random_matrix(rng, 4, 4)
        qa, qb = gen_monomial(4, (1, 50), rng), gen_monomial(4, (1, 50), rng)
        chained = right_apply(right_apply(m, qa), qb)
        assert chained == right_apply(m, compose(qa, qb))
        assert chained == dense_matmul(dense_matmul(m, qa.dense()), qb.dense())


def test_compose_identity_and_permutations():
    q = gen_monomial(4, (1, 9), random.Random(0))
    assert compose(q, MonomialMatrix.identity(4)) == q
    assert compose(MonomialMatrix.identity(4), q) == q
    p1 = MonomialMatrix((1, 2, 0), (1, 1, 1))
    p2 = MonomialMatrix((2, 0, 1), (1, 1, 1))
    assert compose(p1, p2).dense() == dense_matmul(p1.dense(), p2.dense())
    assert set(compose(p1, p2).coeffs) == {1}


def test_compose_random_dense_check():
    rng = random.Random(9)
    for _ in range(20):
        qa, qb = gen_monomial(5, (1, 2 ** 16), rng), gen_monomial(5, (1, 2 ** 16), rng)
        assert (qa @ qb).dense() == dense_matmul(qa.dense(), qb.dense())


def test_compose_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(MonomialMatrix.identity(2), MonomialMatrix.identity(3))


def test_invert_example():
    q = MonomialMatrix((1, 0), (2, 3))
    inv = invert(q)
    assert inv.dense() == [[0, Fraction(1, 3)], [Fraction(1, 2), 0]]
    assert dense_matmul(q.dense(), inv.dense()) == identity_dense(2)


def test_invert_identity_and_involution():
    assert invert(MonomialMatrix.identity(3)) == MonomialMatrix.identity(3)
    q = gen_monomial(6, (1, 2 ** 16), random.Random(3))
    assert invert(invert(q)) == q


@given(monomials)
def test_invert_is_exact_inverse(q):
    assert dense_matmul(q.dense(), invert(q).dense()) == identity_dense(q.dim)
    assert dense_matmul(invert(q).dense(), q.dense()) == identity_dense(q.dim)


def test_apply_vec_examples():
    q = MonomialMatrix((1, 0), (2, 3))
    assert apply_vec(q, [1, 1]) == dense_matvec(q.dense(), [1, 1]) == [2, 3]
    assert apply_vec(q, [0, 0]) == [0, 0]
    with pytest.raises(ValueError):
        apply_vec(q, [1, 2, 3])


def test_apply_vec_preserves_nonnegativity():
    rng = random.Random(4)
    for _ in range(100):
        n = rng.randint(1, 6)
        q = gen_monomial(n, (1, 2 ** 16), rng)
        y = [Fraction(rng.randint(0, 100), rng.randint(1, 9)) for _ in range(n)]
        assert all(v >= 0 for v in apply_vec(q, y))


@given(monomials, monomials)
def test_composition_closure(qa, qb):
    if qa.dim != qb.dim:
        return
    c = compose(qa, qb)
    assert all(v > 0 for v in c.coeffs)
    assert c.dense() == dense_matmul(qa.dense(), qb.dense())


def _feasible(M, b, x):
    return all(v >= 0 for v in x) and all(a <= r for a, r in zip(dense_matvec(M, x), b))


def test_feasibility_transport():
    rng = random.Random(11)
    for _ in range(200):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        M = random_matrix(rng, m, n, denom=4)
        b = [Fraction(rng.randint(-20, 60), 4) for _ in range(m)]
        q = gen_monomial(n, (1, 2 ** 16), rng)
        MQ = right_apply(M, q)
        qinv = invert(q)
        for _ in range(5):
            x = [Fraction(rng.randint(-3, 12), rng.randint(1, 4)) for _ in range(n)]
            y = apply_vec(qinv, x)
            assert _feasible(M, b, x) == _feasible(MQ, b, y)


def test_objective_transport():
    rng = random.Random(12)
    for _ in range(100):
        n = rng.randint(1, 6)
        c = [Fraction(rng.randint(-50, 50), 7) for _ in range(n)]
        x = [Fraction(rng.randint(0, 50), 3) for _ in range(n)]
        q = gen_monomial(n, (1, 2 ** 16), rng)
        cq = linalg.row_apply(c, q)
        assert linalg.dot(c, x) == linalg.dot(cq, apply_vec(invert(q), x))


def test_to_fraction_rejects_floats():
    with pytest.raises(TypeError):
        linalg.to_fraction(0.5)
    assert linalg.to_fraction("3/4") == Fraction(3, 4)
