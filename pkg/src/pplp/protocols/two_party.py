"""Two-party protocols: secure scalar product and the two transformation variants.

Message kinds are named after what they carry so that transcripts can be
compared line by line with the data-flow tables of each protocol:

========================  =====================================
protocol                  kinds received during transformation
========================  =====================================
scalar product            P2: pk, enc_x            P1: enc_w
split (objective/matrix)  P1: pk, enc_M, enc_Q2, enc_MQ2
                          P2: shared_perm, enc_S, enc_V
arbitrary partition       P2: pk, enc_M1, enc_c1
                          P1: enc_MQ2, enc_cQ2, enc_b2
========================  =====================================

Kinds starting with ``recon_`` belong to the solve-and-reconstruct phase.
"""
from __future__ import annotations

from typing import Sequence

from pplp import crypto
from pplp.encoding import (CipherMatrix, EncodingError, add_matrices, decode_int, decrypt_matrix,
                           encode_int, encrypt_matrix)
from pplp.linalg import (MonomialMatrix, apply_vec, column, gen_monomial, right_apply, row_apply,
                         to_fraction, vadd)
from pplp.runtime import ProtocolError, Transcript, run_session
from pplp.solver import Status

from .common import (PartyResult, PartyShare, ProtocolConfig, ProtocolRun, TransformedProblem,
                     check_inputs, check_key_capacity, check_shares, homomorphic_right_mul,
                     homomorphic_vec_mat, mask_bound, monomial_wire, solver_of)
from .reconstruct import reconstruct, solve_transformed


# -- secure scalar product -------------------------------------------------

def _int_vector(v: Sequence, cfg: ProtocolConfig, name: str) -> list[int]:
    out = []
    for i, x in enumerate(v):
        x = to_fraction(x)
        if x.denominator != 1:
            raise EncodingError(f"{name}[{i}] = {x} is not an integer")
        if abs(x) > cfg.scale.max_magnitude:
            raise EncodingError(f"{name}[{i}] exceeds the magnitude bound {cfg.scale.max_magnitude}")
        out.append(x.numerator)
    return out


def secure_scalar_product(X: Sequence[int], Y: Sequence[int], cfg: ProtocolConfig | None = None,
                          seed=0) -> tuple[int, int, Transcript]:
    """P1 holds X, P2 holds Y; returns (r_A at P1, r_B at P2, transcript) with r_A + r_B = X.Y.

    r_B is uniform over the widest range that keeps X.Y - r_B unambiguous.
    """
    cfg = cfg or ProtocolConfig()
    if len(X) != len(Y):
        raise ValueError(f"length mismatch: {len(X)} vs {len(Y)}")
    X = _int_vector(X, cfg, "X")
    Y = _int_vector(Y, cfg, "Y")
    dot_bound = len(X) * cfg.scale.max_magnitude ** 2

    def p1(ctx):
        ctx.hold("X", X)
        kp = crypto.keygen(cfg.key_bits, ctx.rng)
        pk = kp.public_key
        mask_bound([pk.n], dot_bound, 1)
        ctx.send(2, "pk", pk)
        enc = CipherMatrix([[crypto.encrypt_random(pk, encode_int(x, pk), ctx.rng) for x in X]], 0, pk)
        ctx.send(2, "enc_x", enc)
        w = yield ctx.recv(2, "enc_w")
        r_a = decode_int(crypto.decrypt(kp.private_key, w.cells[0][0]), pk)
        ctx.decrypted("r_A", r_a)
        return r_a

    def p2(ctx):
        ctx.hold("Y", Y)
        pk = yield ctx.recv(1, "pk")
        enc = yield ctx.recv(1, "enc_x")
        if enc.cols != len(Y):
            raise ProtocolError("vector length mismatch")
        w = crypto.Ciphertext(1, pk)
        for c, y in zip(enc.cells[0], Y):
            w = crypto.add_cipher(w, crypto.scalar_mul(c, y))
        bound = mask_bound([pk.n], dot_bound, 1)
        r_b = ctx.rng.randint(-bound, bound)
        w = crypto.add_cipher(w, crypto.encrypt_random(pk, encode_int(-r_b, pk), ctx.rng))
        ctx.send(1, "enc_w", CipherMatrix([[w]], 0, pk))
        ctx.compute("r_B", r_b)
        return r_b

    outputs, transcript = run_session({1: p1, 2: p2}, seed)
    return outputs[1], outputs[2], transcript


# -- objective held by P1, constraints by P2 ------------------------------

def _recon_split(ctx, *, q: MonomialMatrix, cfg: ProtocolConfig, transformed: TransformedProblem | None):
    """Solve at P2 and rebuild x* = Q1 y* + Q2 y*."""
    if ctx.party == 2:
        sol = solve_transformed(transformed)
        ctx.compute("y_star", sol.x)
        ctx.send(1, "recon_solution", (sol.status.value, sol.objective, sol.x, transformed.cQ))
        if sol.status is not Status.OPTIMAL:
            return PartyResult(sol.status)
        own = apply_vec(q, sol.x)
        if cfg.mode == "shares":
            ctx.compute("x_share", own)
            return PartyResult(sol.status, sol.objective, share=own)
        partial = yield ctx.recv(1, "recon_partial")
        x = vadd(list(partial), own)
        ctx.compute("x_star", x)
        ctx.send(1, "recon_x", x)
        return PartyResult(sol.status, sol.objective, x=x)

    status, objective, y, _cq = yield ctx.recv(2, "recon_solution")
    status = Status(status)
    if status is not Status.OPTIMAL:
        return PartyResult(status)
    own = apply_vec(q, list(y))
    if cfg.mode == "shares":
        ctx.compute("x_share", own)
        return PartyResult(status, objective, share=own)
    ctx.send(2, "recon_partial", own)
    x = list((yield ctx.recv(2, "recon_x")))
    return PartyResult(status, objective, x=x)


def two_party_transform_split(c: Sequence, M: Sequence[Sequence], b: Sequence,
                              cfg: ProtocolConfig | None = None, seed=0,
                              q1: MonomialMatrix | None = None,
                              q2: MonomialMatrix | None = None) -> ProtocolRun:
    """P1 owns the objective, P2 owns the constraints; P2 ends up solving.

    Q = Q1 + Q2 must be monomial, so both factors share one permutation:
    P1 draws it (or takes it from ``q1``) and sends it to P2, and each party
    keeps its own positive coefficients. A ``q2`` whose permutation differs
    from P1's is rejected.
    """
    cfg = cfg or ProtocolConfig()
    share = PartyShare(M, c, b)
    m, n = share.shape
    check_inputs(cfg, share.M, [share.c], column(share.b))
    e = cfg.data_exp
    if cfg.solver not in (None, 2):
        raise ValueError("in the split protocol the constraint holder P2 solves")

    def p1(ctx):
        q = q1 or _draw_monomial(ctx, n, cfg)
        ctx.hold("c", share.c)
        ctx.hold("Q1", monomial_wire(q))
        ctx.send(2, "shared_perm", q.perm)
        pk = yield ctx.recv(2, "pk")
        enc_m = yield ctx.recv(2, "enc_M")
        enc_q2 = yield ctx.recv(2, "enc_Q2")
        enc_mq2 = yield ctx.recv(2, "enc_MQ2")
        s = add_matrices(homomorphic_right_mul(enc_m, q, cfg.scale), enc_mq2)
        cq1 = encrypt_matrix([row_apply(share.c, q)], e, pk, cfg.scale, ctx.rng)
        v = add_matrices(homomorphic_vec_mat(share.c, enc_q2, e, cfg.scale), cq1)
        ctx.send(2, "enc_S", s)
        ctx.send(2, "enc_V", v)
        result = yield from _recon_split(ctx, q=q, cfg=cfg, transformed=None)
        return {"result": result, "q": q}

    def p2(ctx):
        ctx.hold("M", share.M)
        ctx.hold("b", share.b)
        perm = tuple((yield ctx.recv(1, "shared_perm")))
        if q2 is not None and q2.perm != perm:
            raise ProtocolError("permutation mismatch: Q1 + Q2 would not be monomial")
        q = q2 or _draw_coeffs(ctx, perm, cfg)
        ctx.hold("Q2", monomial_wire(q))
        kp = crypto.keygen(cfg.key_bits, ctx.rng)
        pk = kp.public_key
        check_key_capacity(pk, cfg, n, 1)
        ctx.send(1, "pk", pk)
        ctx.send(1, "enc_M", encrypt_matrix(share.M, e, pk, cfg.scale, ctx.rng))
        ctx.send(1, "enc_Q2", encrypt_matrix(q.dense(), 0, pk, cfg.scale, ctx.rng))
        ctx.send(1, "enc_MQ2", encrypt_matrix(right_apply(share.M, q), e, pk, cfg.scale, ctx.rng))
        s = yield ctx.recv(1, "enc_S")
        v = yield ctx.recv(1, "enc_V")
        mq = decrypt_matrix(s, kp.private_key, cfg.scale)
        cq = decrypt_matrix(v, kp.private_key, cfg.scale)[0]
        ctx.decrypted("MQ", mq)
        ctx.decrypted("cQ", cq)
        t = TransformedProblem(mq, cq, share.b, 2)
        result = yield from _recon_split(ctx, q=q, cfg=cfg, transformed=t)
        return {"result": result, "q": q, "transformed": t}

    outputs, transcript = run_session({1: p1, 2: p2}, seed)
    return ProtocolRun({p: o["result"] for p, o in outputs.items()}, transcript, outputs,
                       outputs[2]["transformed"])


def _draw_monomial(ctx, n: int, cfg: ProtocolConfig) -> MonomialMatrix:
    return gen_monomial(n, cfg.coeff_range, ctx.rng)


def _draw_coeffs(ctx, perm: tuple[int, ...], cfg: ProtocolConfig) -> MonomialMatrix:
    lo, hi = cfg.coeff_range
    return MonomialMatrix(perm, tuple(ctx.rng.randint(lo, hi) for _ in perm))


# -- both parties hold additive shares ------------------------------------

def two_party_transform_arbitrary(share1: PartyShare, share2: PartyShare,
                                  cfg: ProtocolConfig | None = None, seed=0) -> ProtocolRun:
    """Arbitrarily partitioned two-party transformation.

    P1 owns the key pair and obtains ``M Q2 Q1``, ``c^T Q2 Q1`` and the
    aggregate ``b``. P2 only ever sees ciphertexts under P1's key. The
    right-hand side is summed homomorphically, so P1 decrypts nothing but
    the aggregate.
    """
    cfg = cfg or ProtocolConfig()
    m, n = check_shares([share1, share2])
    for s in (share1, share2):
        check_inputs(cfg, s.M, [s.c], column(s.b))
    solver = solver_of(cfg, (1, 2), default=1)
    e = cfg.data_exp

    def p1(ctx):
        q = share1.q or _draw_monomial(ctx, n, cfg)
        ctx.hold("M1", share1.M)
        ctx.hold("c1", share1.c)
        ctx.hold("b1", share1.b)
        ctx.hold("Q1", monomial_wire(q))
        kp = crypto.keygen(cfg.key_bits, ctx.rng)
        pk = kp.public_key
        check_key_capacity(pk, cfg, n, 2)
        ctx.send(2, "pk", pk)
        ctx.send(2, "enc_M1", encrypt_matrix(share1.M, e, pk, cfg.scale, ctx.rng))
        ctx.send(2, "enc_c1", encrypt_matrix([share1.c], e, pk, cfg.scale, ctx.rng))
        enc_mq2 = yield ctx.recv(2, "enc_MQ2")
        enc_cq2 = yield ctx.recv(2, "enc_cQ2")
        enc_b2 = yield ctx.recv(2, "enc_b2")
        enc_b = add_matrices(enc_b2, encrypt_matrix(column(share1.b), e, pk, cfg.scale, ctx.rng))
        sk = kp.private_key
        mq = decrypt_matrix(homomorphic_right_mul(enc_mq2, q, cfg.scale), sk, cfg.scale)
        cq = decrypt_matrix(homomorphic_right_mul(enc_cq2, q, cfg.scale), sk, cfg.scale)[0]
        b = [r[0] for r in decrypt_matrix(enc_b, sk, cfg.scale)]
        ctx.decrypted("MQ", mq)
        ctx.decrypted("cQ", cq)
        ctx.decrypted("b", b)
        t = TransformedProblem(mq, cq, b, solver)
        if solver == 2:
            ctx.send(2, "transformed_problem", (mq, cq, b))
        result = yield from reconstruct(ctx, solver=solver, chain=[2, 1], q=q, cfg=cfg,
                                        keypair=kp if solver == 1 else None,
                                        transformed=t if solver == 1 else None)
        return {"result": result, "q": q, "transformed": t}

    def p2(ctx):
        q = share2.q or _draw_monomial(ctx, n, cfg)
        ctx.hold("M2", share2.M)
        ctx.hold("c2", share2.c)
        ctx.hold("b2", share2.b)
        ctx.hold("Q2", monomial_wire(q))
        pk = yield ctx.recv(1, "pk")
        enc_m1 = yield ctx.recv(1, "enc_M1")
        enc_c1 = yield ctx.recv(1, "enc_c1")
        enc_m = add_matrices(enc_m1, encrypt_matrix(share2.M, e, pk, cfg.scale, ctx.rng))
        enc_c = add_matrices(enc_c1, encrypt_matrix([share2.c], e, pk, cfg.scale, ctx.rng))
        ctx.send(1, "enc_MQ2", homomorphic_right_mul(enc_m, q, cfg.scale))
        ctx.send(1, "enc_cQ2", homomorphic_right_mul(enc_c, q, cfg.scale))
        ctx.send(1, "enc_b2", encrypt_matrix(column(share2.b), e, pk, cfg.scale, ctx.rng))
        t = None
        if solver == 2:
            mq, cq, b = yield ctx.recv(1, "transformed_problem")
            t = TransformedProblem([list(r) for r in mq], list(cq), list(b), 2)
        result = yield from reconstruct(ctx, solver=solver, chain=[2, 1], q=q, cfg=cfg,
                                        transformed=t)
        return {"result": result, "q": q}

    outputs, transcript = run_session({1: p1, 2: p2}, seed)
    return ProtocolRun({p: o["result"] for p, o in outputs.items()}, transcript, outputs,
                       outputs[1]["transformed"])
