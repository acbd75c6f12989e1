"""Solving the transformed problem and mapping its solution back.

For a chain ``Q = Q_a @ Q_b @ ... @ Q_z`` spread over parties, ``x* = Q y*``
is obtained by applying ``Q_z`` first and ``Q_a`` last. The vector travels
encrypted under the solver's key, so intermediate products stay hidden.

* reveal: the solver decrypts ``x*`` and broadcasts it.
* shares: after the last monomial factor every other party adds a fresh
  encrypted integer mask ``-r_j`` and keeps ``r_j``; the solver recovers
  ``x* - sum r_j``. The shares sum to ``x*`` and nobody holds it alone.

The denominators of ``y*`` absorb the chained coefficients, so scaling it
to integers can outgrow the plaintext space. Instead each entry ``a/b`` is encrypted as ``a * b^-1 mod n``. Integer
coefficients act on that residue exactly, and the solver recovers the small
rational ``x*_i`` (or ``x*_i - sum r_j``) by rational reconstruction.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from pplp import crypto
from pplp.encoding import (CipherMatrix, encode_int, encode_rational_mod, rational_bounds,
                           rational_reconstruct)
from pplp.linalg import MonomialMatrix
from pplp.runtime import PartyContext, run_session
from pplp.solver import LpProblem, LpSolution, Status, simplex_solve

from .common import (PartyResult, ProtocolConfig, ProtocolRun, TransformedProblem,
                     homomorphic_apply_vec)


def solve_transformed(t: TransformedProblem) -> LpSolution:
    return simplex_solve(LpProblem(t.cQ, t.MQ, t.b))


def reconstruct(ctx: PartyContext, *, solver: int, chain: Sequence[int],
                q: MonomialMatrix | None, cfg: ProtocolConfig,
                keypair: crypto.KeyPair | None = None,
                transformed: TransformedProblem | None = None):
    """Party subprogram: solve at ``solver`` and rebuild ``x* = Q_chain y*``.

    Every party runs this with the same ``solver`` and ``chain``; ``q`` is
    the caller's own factor (None if it holds none). Returns a PartyResult.
    """
    me = ctx.party
    others = [p for p in ctx.parties if p != solver]
    if me == solver:
        sol = solve_transformed(transformed)
        ctx.compute("y_star", sol.x)
        for p in others:
            ctx.send(p, "recon_status", (sol.status.value, sol.objective))
        status, objective = sol.status, sol.objective
    else:
        status_name, objective = yield ctx.recv(solver, "recon_status")
        status = Status(status_name)
    if status is not Status.OPTIMAL:
        return PartyResult(status)

    apply_order = list(reversed(chain))
    enc = None
    if me == solver:
        if keypair is None:
            keypair = crypto.keygen(cfg.key_bits, ctx.rng)
        pk = keypair.public_key
        enc = CipherMatrix([[crypto.encrypt_random(pk, encode_rational_mod(v, pk), ctx.rng)]
                            for v in sol.x], 0, pk)

    holder = solver
    for k in apply_order:
        if holder != k:
            if me == holder:
                ctx.send(k, "recon_chain", enc)
            elif me == k:
                enc = yield ctx.recv(holder, "recon_chain")
            holder = k
        if me == k:
            enc = homomorphic_apply_vec(q, enc, cfg.scale)

    own_mask = None
    if cfg.mode == "shares":
        maskers = [p for p in ctx.parties if p != solver]
        if holder in maskers:
            i = maskers.index(holder)
            maskers = maskers[i:] + maskers[:i]
        for j in maskers:
            if holder != j:
                if me == holder:
                    ctx.send(j, "recon_mask", enc)
                elif me == j:
                    enc = yield ctx.recv(holder, "recon_mask")
                holder = j
            if me == j:
                pk = enc.public_key
                num_bound, den_bound = rational_bounds(pk)
                bound = num_bound // (2 * den_bound * len(maskers))
                own_mask = [0 if cfg.zero_masks else ctx.rng.randint(-bound, bound) for _ in range(enc.rows)]
                enc = CipherMatrix(
                    [[crypto.add_cipher(c[0], crypto.encrypt_random(pk, encode_int(-r, pk), ctx.rng))]
                     for c, r in zip(enc.cells, own_mask)], enc.scale_exp, pk)

    if holder != solver:
        if me == holder:
            ctx.send(solver, "recon_return", enc)
        elif me == solver:
            enc = yield ctx.recv(holder, "recon_return")

    if me == solver:
        sk = keypair.private_key
        # masks use at most half the numerator range, leaving the other half for x*
        num_bound, den_bound = rational_bounds(sk.public_key)
        values = [rational_reconstruct(crypto.decrypt(sk, c[0]), sk.public_key, num_bound, den_bound)
                  for c in enc.cells]
        if cfg.mode == "reveal":
            ctx.decrypted("x_star", values)
            for p in others:
                ctx.send(p, "recon_x", values)
            return PartyResult(status, objective, x=values)
        ctx.decrypted("x_share", values)
        return PartyResult(status, objective, share=values)

    if cfg.mode == "reveal":
        x = list((yield ctx.recv(solver, "recon_x")))
        return PartyResult(status, objective, x=x)
    share = [Fraction(r) for r in own_mask]
    ctx.compute("x_share", share)
    return PartyResult(status, objective, share=share)


def solve_and_reconstruct(t: TransformedProblem, chain: Sequence[int],
                          factors: Mapping[int, MonomialMatrix], cfg: ProtocolConfig,
                          parties: Sequence[int] | None = None, seed=0) -> ProtocolRun:
    """Standalone session running only the solve-and-reconstruct phase.

    ``chain`` lists the owners of the monomial factors in product order;
    ``factors`` maps each owner to its factor.
    """
    parties = sorted(set(parties or ()) | set(chain) | {t.solver_party})

    def program(p):
        def run(ctx):
            result = yield from reconstruct(ctx, solver=t.solver_party, chain=chain,
                                            q=factors.get(p), cfg=cfg,
                                            transformed=t if p == t.solver_party else None)
            return {"result": result}
        return run

    outputs, transcript = run_session({p: program(p) for p in parties}, seed)
    return ProtocolRun({p: o["result"] for p, o in outputs.items()}, transcript, outputs, t)
