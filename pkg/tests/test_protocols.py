import random
from collections import Counter
from fractions import Fraction

import pytest

from oracles import brute_force_lp, dense_matmul, monomial_dense
from pplp.encoding import ScaleConfig, decrypt_matrix, encrypt_matrix
from pplp.instances import combine, random_lp, split_problem, textbook_problem
from pplp.linalg import MonomialMatrix, compose, gen_monomial, right_apply
from pplp.protocols import (PartyShare, ProtocolConfig, homomorphic_right_mul, mask_offsets,
                            multi_party_transform, net_mask_offsets, published_sum, sample_mask,
                            secure_scalar_product, two_party_transform_arbitrary,
                            two_party_transform_split)
from pplp.runtime import ProtocolError, transcript_assert
from pplp.solver import LpProblem, Status, simplex_solve, verify_solution


def entries_of(*objs):
    out = set()
    for o in objs:
        for r in (o if isinstance(o[0], list) else [o]):
            out.update(Fraction(v) for v in r if v != 0)
    return out


def zero_share(p):
    m, n = len(p.M), len(p.c)
    return PartyShare([[0] * n for _ in range(m)], [0] * n, [0] * m)


# -- scalar product ---------------------------------------------------------

@pytest.mark.parametrize("X, Y", [((1, 2, 3), (4, 5, 6)), ((1, 2, 3), (0, 0, 0)), ((1,), (-7,))])
def test_scalar_product_examples(cfg, X, Y):
    r_a, r_b, t = secure_scalar_product(X, Y, cfg, seed=1)
    assert r_a + r_b == sum(x * y for x, y in zip(X, Y))
    assert t.received_kinds(2) == Counter({"pk": 1, "enc_x": 1})
    assert t.received_kinds(1) == Counter({"enc_w": 1})


def test_scalar_product_random_signed(cfg):
    rng = random.Random(0)
    for seed in range(10):
        n = rng.randint(1, 6)
        X = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(n)]
        Y = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(n)]
        r_a, r_b, _ = secure_scalar_product(X, Y, cfg, seed=seed)
        assert r_a + r_b == sum(x * y for x, y in zip(X, Y))


def test_scalar_product_mask_hides_result(cfg):
    values = {secure_scalar_product((1, 2, 3), (4, 5, 6), cfg, seed=s)[0] for s in range(6)}
    assert len(values) == 6 and 32 not in values


def test_scalar_product_errors(cfg):
    with pytest.raises(ValueError):
        secure_scalar_product((1, 2), (1,), cfg)
    with pytest.raises(Exception):
        secure_scalar_product((Fraction(1, 2),), (1,), cfg)


# -- homomorphic right multiplication ------------------------------------------

def test_right_mul_identity(keypair):
    scale = ScaleConfig()
    m = [[Fraction(1), Fraction(-2)], [Fraction(5, 4), Fraction(0)]]
    c = encrypt_matrix(m, 1, keypair.public_key, scale, random.Random(0))
    out = homomorphic_right_mul(c, MonomialMatrix.identity(2), scale)
    assert decrypt_matrix(out, keypair.private_key, scale) == m


def test_right_mul_example(keypair):
    scale = ScaleConfig()
    q = MonomialMatrix((1, 0), (2, 3))
    c = encrypt_matrix([[1, 2], [3, 4]], 0, keypair.public_key, scale, random.Random(0))
    out = decrypt_matrix(homomorphic_right_mul(c, q, scale), keypair.private_key, scale)
    assert out == dense_matmul([[1, 2], [3, 4]], monomial_dense(q.perm, q.coeffs)) == [[6, 2], [12, 6]]


def test_right_mul_with_mask(keypair):
    scale = ScaleConfig()
    rng = random.Random(5)
    for _ in range(5):
        m = [[Fraction(rng.randint(-999, 999), 8) for _ in range(3)] for _ in range(3)]
        q = gen_monomial(3, (1, 2 ** 16), rng)
        mask = sample_mask(3, 3, 2 ** 100, 1, scale, rng)
        c = encrypt_matrix(m, 1, keypair.public_key, scale, rng)
        dec = decrypt_matrix(homomorphic_right_mul(c, q, scale, rng, mask=mask), keypair.private_key, scale)
        unmasked = [[a - r for a, r in zip(u, v)] for u, v in zip(dec, mask)]
        assert unmasked == dense_matmul(m, monomial_dense(q.perm, q.coeffs))


def test_right_mul_dimension_mismatch(keypair):
    c = encrypt_matrix([[1, 2]], 0, keypair.public_key, ScaleConfig(), random.Random(0))
    with pytest.raises(ValueError):
        homomorphic_right_mul(c, MonomialMatrix.identity(3), ScaleConfig())


# -- objective/constraints split ------------------------------------------

def test_split_textbook(cfg):
    p = textbook_problem()
    run = two_party_transform_split(p.c, p.M, p.b, cfg, seed=3)
    assert run.status is Status.OPTIMAL
    assert run.objective == -36
    assert run.x == [2, 6]
    assert all(r.x == [2, 6] for r in run.results.values())


def test_split_transformed_matches_oracle(cfg):
    p = textbook_problem()
    run = two_party_transform_split(p.c, p.M, p.b, cfg, seed=4)
    q1, q2 = run.outputs[1]["q"], run.outputs[2]["q"]
    assert q1.perm == q2.perm
    q = [[a + b for a, b in zip(u, v)] for u, v in zip(q1.dense(), q2.dense())]
    assert run.transformed.MQ == dense_matmul(p.M, q)
    assert run.transformed.cQ == dense_matmul([p.c], q)[0]


def test_split_permutation_mismatch(cfg):
    p = textbook_problem()
    q1 = MonomialMatrix((0, 1), (3, 4))
    q2 = MonomialMatrix((1, 0), (5, 6))
    with pytest.raises(ProtocolError, match="permutation mismatch"):
        two_party_transform_split(p.c, p.M, p.b, cfg, q1=q1, q2=q2)


def test_split_rejects_zero_coefficients():
    with pytest.raises(ValueError):
        MonomialMatrix((1, 0), (0, 2))


def test_split_transcript_hygiene(cfg):
    p = textbook_problem()
    run = two_party_transform_split(p.c, p.M, p.b, cfg, seed=5)
    t = run.transcript
    assert t.received_kinds(1, "recon_") == Counter({"pk": 1, "enc_M": 1, "enc_Q2": 1, "enc_MQ2": 1})
    assert t.received_kinds(2, "recon_") == Counter({"shared_perm": 1, "enc_S": 1, "enc_V": 1})
    m_entries = entries_of(p.M)
    assert transcript_assert(t, 1, m_entries.__contains__, kinds={"pk", "enc_M", "enc_Q2", "enc_MQ2"}).ok
    assert not t.entries(1, "decrypt")
    assert {e.tag for e in t.entries(2, "decrypt")} == {"MQ", "cQ"}
    # c only reaches P2 folded into c^T(Q1+Q2)
    assert transcript_assert(t, 2, set(p.c).__contains__, kinds={"shared_perm", "enc_S", "enc_V"}).ok


def test_split_only_constraint_holder_solves(cfg):
    p = textbook_problem()
    with pytest.raises(ValueError):
        two_party_transform_split(p.c, p.M, p.b, ProtocolConfig(key_bits=256, solver=1))


def test_split_shares_mode(cfg):
    p = textbook_problem()
    run = two_party_transform_split(p.c, p.M, p.b, ProtocolConfig(key_bits=256, mode="shares"), seed=6)
    shares = [r.share for r in run.results.values()]
    assert all(s is not None for s in shares) and all(r.x is None for r in run.results.values())
    assert run.x == [2, 6]


# -- arbitrary two-party partition ---------------------------------------------

def test_arbitrary_textbook(cfg):
    p = textbook_problem()
    s1, s2 = split_problem(p, 2, random.Random(1), denom=4)
    run = two_party_transform_arbitrary(s1, s2, cfg, seed=2)
    assert (run.status, run.objective, run.x) == (Status.OPTIMAL, -36, [2, 6])


def test_arbitrary_degenerate_share(cfg):
    p = textbook_problem()
    s1 = PartyShare(p.M, p.c, p.b)
    s2 = PartyShare(zero_share(p).M, zero_share(p).c, zero_share(p).b, MonomialMatrix.identity(2))
    run = two_party_transform_arbitrary(s1, s2, cfg, seed=3)
    assert run.objective == simplex_solve(p).objective == -36
    q1 = run.outputs[1]["q"]
    assert run.transformed.MQ == right_apply(p.M, q1)


def test_arbitrary_transcript_hygiene(cfg):
    p = textbook_problem()
    s1, s2 = split_problem(p, 2, random.Random(4), denom=4)
    run = two_party_transform_arbitrary(s1, s2, cfg, seed=5)
    t = run.transcript
    assert set(t.received_kinds(2, "recon_")) == {"pk", "enc_M1", "enc_c1"}
    assert t.received_kinds(1, "recon_") == Counter({"enc_MQ2": 1, "enc_cQ2": 1, "enc_b2": 1})
    q1 = run.outputs[1]["q"]
    secret = entries_of(s1.M, s1.c) | {Fraction(v) for v in q1.coeffs}
    assert transcript_assert(t, 2, secret.__contains__, kinds={"pk", "enc_M1", "enc_c1"}).ok
    assert not t.entries(2, "decrypt")
    # x_star is the reconstruction phase; the transformation reveals only the aggregates
    assert {e.tag for e in t.entries(1, "decrypt")} == {"MQ", "cQ", "b", "x_star"}
    q = compose(run.outputs[2]["q"], q1)
    assert t.value(1, "decrypt", "MQ") == tuple(tuple(r) for r in right_apply(p.M, q))
    assert t.value(1, "decrypt", "b") == tuple(p.b)


def test_arbitrary_solver_two(cfg):
    p = textbook_problem()
    s1, s2 = split_problem(p, 2, random.Random(6), denom=4)
    run = two_party_transform_arbitrary(s1, s2, ProtocolConfig(key_bits=256, solver=2), seed=7)
    assert (run.objective, run.x) == (-36, [2, 6])
    assert run.transcript.received_kinds(2)["transformed_problem"] == 1


def test_arbitrary_random_instances(cfg):
    rng = random.Random(10)
    for seed in range(8):
        p = random_lp(rng, rng.randint(1, 4), rng.randint(1, 4), denom=4)
        s1, s2 = split_problem(p, 2, rng, denom=4)
        ref = simplex_solve(p)
        run = two_party_transform_arbitrary(s1, s2, cfg, seed=seed)
        assert (run.status, run.objective) == (ref.status, ref.objective)
        assert verify_solution(p, run.x).feasible


def test_arbitrary_dimension_mismatch(cfg):
    a = PartyShare([[1, 2]], [1, 1], [1])
    b = PartyShare([[1]], [1], [1])
    with pytest.raises(ValueError):
        two_party_transform_arbitrary(a, b, cfg)


# -- multi-party ---------------------------------------------------------

def test_multi_party_published_sum_matches_oracle(cfg):
    p = textbook_problem()
    shares = split_problem(p, 3, random.Random(2), denom=4)
    run = multi_party_transform(shares, cfg, seed=1)
    q = compose(compose(run.outputs[1]["q"], run.outputs[2]["q"]), run.outputs[3]["q"])
    qd = monomial_dense(q.perm, q.coeffs)
    total_m = [[sum(s.M[i][j] for s in shares) for j in range(2)] for i in range(3)]
    mq, cq, b = published_sum(run)
    assert mq == dense_matmul(total_m, qd)
    assert cq == dense_matmul([p.c], qd)
    assert [r[0] for r in b] == p.b
    assert (run.objective, run.x) == (-36, [2, 6])


def test_multi_party_zero_masks(cfg):
    p = textbook_problem()
    shares = split_problem(p, 3, random.Random(3), denom=4)
    run = multi_party_transform(shares, ProtocolConfig(key_bits=256, zero_masks=True), seed=2)
    q = compose(compose(run.outputs[1]["q"], run.outputs[2]["q"]), run.outputs[3]["q"])
    for i, s in enumerate(shares, start=1):
        assert run.outputs[i]["published"][0] == right_apply(s.M, q)


def test_multi_party_masks_are_nonzero(cfg):
    shares = split_problem(textbook_problem(), 3, random.Random(3), denom=4)
    run = multi_party_transform(shares, cfg, seed=2)
    offsets = mask_offsets(run)
    assert any(v != 0 for r in offsets[1] for v in r)
    total = [[sum(offsets[i][r][c] for i in offsets) for c in range(2)] for r in range(3)]
    assert total == [[0, 0]] * 3


def test_mask_cancellation_isolated():
    rng = random.Random(0)
    scale = ScaleConfig()
    parties = [1, 2, 3, 4]
    masks = {(i, j): sample_mask(3, 3, 2 ** 64, 1, scale, rng) for i in parties for j in parties if i != j}
    offsets = net_mask_offsets(masks, parties)
    for r in range(3):
        for c in range(3):
            assert sum(offsets[i][r][c] for i in parties) == 0
    assert any(offsets[1][0][c] != 0 for c in range(3))


def test_multi_party_l4_shares_mode():
    p = textbook_problem()
    shares = split_problem(p, 4, random.Random(9), denom=4)
    run = multi_party_transform(shares, ProtocolConfig(key_bits=256, mode="shares"), seed=3)
    assert all(r.x is None and r.share is not None for r in run.results.values())
    assert (run.objective, run.x) == (-36, [2, 6])


def test_multi_party_transcript_kinds(cfg):
    shares = split_problem(textbook_problem(), 3, random.Random(1), denom=4)
    run = multi_party_transform(shares, ProtocolConfig(key_bits=256, mode="shares"), seed=0)
    t = run.transcript
    assert t.received_kinds(2) == Counter({"chain": 3, "mask": 2, "masked_return": 1, "pk": 2,
                                           "recon_chain": 1, "recon_mask": 1, "recon_status": 1})
    # each party decrypts only its own masked share
    for i in (1, 2, 3):
        assert {e.tag for e in t.entries(i, "decrypt")} - {"x_share", "x_star"} == {"masked_share"}


def test_multi_party_no_foreign_plaintext(cfg):
    shares = split_problem(textbook_problem(), 3, random.Random(5), denom=4)
    run = multi_party_transform(shares, cfg, seed=4)
    t = run.transcript
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            secret = entries_of(shares[j - 1].M) | {Fraction(v) for v in run.outputs[j]["q"].coeffs if v > 1}
            report = transcript_assert(t, i, secret.__contains__, kinds={"pk", "chain", "mask", "masked_return"})
            assert report.ok


def test_multi_party_rejects_two_parties(cfg):
    shares = split_problem(textbook_problem(), 2, random.Random(0))
    with pytest.raises(ValueError, match="at least 3 parties"):
        multi_party_transform(shares, cfg)


def test_multi_party_other_solver():
    p = textbook_problem()
    shares = split_problem(p, 3, random.Random(7), denom=4)
    run = multi_party_transform(shares, ProtocolConfig(key_bits=256, solver=3), seed=1)
    assert run.transformed.solver_party == 3
    assert (run.objective, run.x) == (-36, [2, 6])


# -- status fidelity ---------------------------------------------------------

def _status_cases():
    unbounded = LpProblem([-1, 0], [[-1, 0]], [-1])
    infeasible = LpProblem([1, 1], [[1, 1], [-1, -1]], [1, -2])
    return [(unbounded, Status.UNBOUNDED), (infeasible, Status.INFEASIBLE)]


@pytest.mark.parametrize("case", range(2))
def test_status_fidelity_all_variants(cfg, case):
    p, status = _status_cases()[case]
    assert brute_force_lp(p.c, p.M, p.b)[0] == status.value
    rng = random.Random(case)
    runs = [two_party_transform_split(p.c, p.M, p.b, cfg, seed=1),
            two_party_transform_arbitrary(*split_problem(p, 2, rng, denom=4), cfg=cfg, seed=1),
            multi_party_transform(split_problem(p, 3, rng, denom=4), cfg, seed=1)]
    for run in runs:
        assert run.status is status
        assert all(r.status is status and r.x is None and r.objective is None for r in run.results.values())


def test_combine_inverts_split():
    p = random_lp(random.Random(1), 3, 3, denom=4)
    shares = split_problem(p, 4, random.Random(2), denom=4)
    q = combine(shares)
    assert (q.c, q.M, q.b) == (p.c, p.M, p.b)
