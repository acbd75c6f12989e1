"""Multi-party transformation with masked shares and a secure sum.

Every party P_i owns an additive share (M_i, c_i, b_i) and a private monomial
factor Q_i. With Q = Q_1 Q_2 ... Q_l the parties jointly publish shares of
``(sum M_i) Q`` and ``(sum c_i)^T Q`` to the solver:

1. P_i encrypts its share under its own key.
2. The ciphertext visits P_1, ..., P_l in order and each holder applies its
   factor homomorphically (``chain``). The right-hand side rides along
   untransformed.
3. The transformed ciphertext then visits every other party, each adding a
   fresh encrypted mask (``mask``), and returns to P_i (``masked_return``).
4. P_i decrypts, subtracts the masks it added to the other shares and sends
   the result to the solver (``published``).

Masks are added only after the whole chain. Had they been added between
factors, later factors would scale them and they would no longer cancel.
Each mask appears once with a plus sign (in its target's share) and once
with a minus sign (subtracted by its author), so the published shares sum
exactly to the transformed aggregate.
"""
from __future__ import annotations

from typing import Sequence

from pplp import crypto
from pplp.encoding import decrypt_matrix, encrypt_matrix
from pplp.linalg import Matrix, column, gen_monomial
from pplp.runtime import ProtocolError, run_session

from .common import (PartyShare, ProtocolConfig, ProtocolRun, TransformedProblem, check_inputs,
                     check_key_capacity, check_shares, data_bound, encrypt_mask_into,
                     homomorphic_right_mul, mask_bound, monomial_wire, net_mask_offsets,
                     sample_mask, solver_of)
from .reconstruct import reconstruct

MIN_PARTIES = 3


def _msub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(u, v)] for u, v in zip(a, b)]


def _madd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(u, v)] for u, v in zip(a, b)]


def _relay(ctx, holder: int, target: int, kind: str, bundle):
    """Move ``bundle`` from ``holder`` to ``target``; returns what this party now holds."""
    if holder == target:
        return bundle
    if ctx.party == holder:
        ctx.send(target, kind, bundle)
        return None
    if ctx.party == target:
        return tuple((yield ctx.recv(holder, kind)))
    return bundle


def multi_party_transform(shares: Sequence[PartyShare], cfg: ProtocolConfig | None = None,
                          seed=0) -> ProtocolRun:
    """Run the l-party transformation (l >= 3), then solve and reconstruct.

    ``shares[k]`` belongs to party ``k + 1``. Each party's output records its
    factor, the masks it drew (keyed by target party) and its published share.
    """
    cfg = cfg or ProtocolConfig()
    l = len(shares)
    if l < MIN_PARTIES:
        raise ValueError(f"multi-party transformation requires at least {MIN_PARTIES} parties, got {l}")
    m, n = check_shares(shares)
    for s in shares:
        check_inputs(cfg, s.M, [s.c], column(s.b))
    parties = tuple(range(1, l + 1))
    solver = solver_of(cfg, parties, default=1)
    e = cfg.data_exp
    reserved = data_bound(cfg, l)

    def program(me: int):
        share = shares[me - 1]

        def run(ctx):
            q = share.q or gen_monomial(n, cfg.coeff_range, ctx.rng)
            ctx.hold("M", share.M)
            ctx.hold("c", share.c)
            ctx.hold("b", share.b)
            ctx.hold("Q", monomial_wire(q))
            kp = crypto.keygen(cfg.key_bits, ctx.rng)
            check_key_capacity(kp.public_key, cfg, n, l)
            for p in ctx.others:
                ctx.send(p, "pk", kp.public_key)
            keys = {me: kp.public_key}
            for p in ctx.others:
                keys[p] = yield ctx.recv(p, "pk")
            bound = mask_bound([k.n for k in keys.values()], reserved, l - 1)

            masks_out: dict[int, tuple[Matrix, Matrix, Matrix]] = {}
            published = None
            for owner in parties:
                bundle = None
                if me == owner:
                    pk = kp.public_key
                    bundle = (encrypt_matrix(share.M, e, pk, cfg.scale, ctx.rng),
                              encrypt_matrix([share.c], e, pk, cfg.scale, ctx.rng),
                              encrypt_matrix(column(share.b), e, pk, cfg.scale, ctx.rng))
                holder = owner
                for k in parties:
                    bundle = yield from _relay(ctx, holder, k, "chain", bundle)
                    holder = k
                    if me == k:
                        if bundle[0].public_key != keys[owner]:
                            raise ProtocolError(f"share of P{owner} arrived under a foreign key")
                        bundle = (homomorphic_right_mul(bundle[0], q, cfg.scale),
                                  homomorphic_right_mul(bundle[1], q, cfg.scale), bundle[2])
                maskers = [p for p in parties if p != owner]
                start = maskers.index(holder) if holder in maskers else 0
                for j in maskers[start:] + maskers[:start]:
                    bundle = yield from _relay(ctx, holder, j, "mask", bundle)
                    holder = j
                    if me == j:
                        drawn = tuple(sample_mask(c.rows, c.cols, bound, e, cfg.scale, ctx.rng,
                                                  zero=cfg.zero_masks) for c in bundle)
                        masks_out[owner] = drawn
                        bundle = tuple(encrypt_mask_into(c, r, cfg.scale, ctx.rng)
                                       for c, r in zip(bundle, drawn))
                bundle = yield from _relay(ctx, holder, owner, "masked_return", bundle)
                if me == owner:
                    sk = kp.private_key
                    mq, cq, b = (decrypt_matrix(c, sk, cfg.scale) for c in bundle)
                    ctx.decrypted("masked_share", (mq, cq, b))
                    published = (mq, cq, b)

            mq, cq, b = published
            for r_m, r_c, r_b in masks_out.values():
                mq, cq, b = _msub(mq, r_m), _msub(cq, r_c), _msub(b, r_b)
            published = (mq, cq, b)
            ctx.compute("published_share", published)

            transformed = None
            if me == solver:
                total = published
                for p in parties:
                    if p != solver:
                        other = yield ctx.recv(p, "published")
                        total = tuple(_madd(a, [list(r) for r in o]) for a, o in zip(total, other))
                mq_sum, cq_sum, b_sum = total
                transformed = TransformedProblem(mq_sum, cq_sum[0], [r[0] for r in b_sum], solver)
                ctx.compute("transformed", (mq_sum, cq_sum[0], transformed.b))
            else:
                ctx.send(solver, "published", published)

            result = yield from reconstruct(ctx, solver=solver, chain=list(parties), q=q, cfg=cfg,
                                            keypair=kp if me == solver else None,
                                            transformed=transformed)
            return {"result": result, "q": q, "masks": masks_out, "published": published,
                    "transformed": transformed}
        return run

    outputs, transcript = run_session({p: program(p) for p in parties}, seed)
    return ProtocolRun({p: o["result"] for p, o in outputs.items()}, transcript, outputs,
                       outputs[solver]["transformed"])


def published_sum(run: ProtocolRun) -> tuple[Matrix, Matrix, Matrix]:
    """Sum of every party's published (MQ, c^T Q, b) share."""
    total = None
    for o in run.outputs.values():
        share = o["published"]
        total = share if total is None else tuple(_madd(a, b) for a, b in zip(total, share))
    return total


def mask_offsets(run: ProtocolRun, part: int = 0) -> dict[int, Matrix]:
    """Net mask carried by each party's published share (0 = M, 1 = c, 2 = b)."""
    masks = {(target, author): o["masks"][target][part]
             for author, o in run.outputs.items() for target in o["masks"]}
    return net_mask_offsets(masks, sorted(run.outputs))


__all__ = ["MIN_PARTIES", "multi_party_transform", "published_sum", "mask_offsets"]
