"""Command-line entry point: ``pplp keygen|solve|run|attack|bench``."""
from __future__ import annotations

import argparse
import random
import secrets
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from pplp import crypto
from pplp.attack import AttackInput, AttackResult, audit_protocol_run, bednarz_enumerate
from pplp.encoding import EncodingError, ScaleConfig, encrypt_matrix
from pplp.formats import (ParseError, format_rational, format_vector, is_partition, parse_evidence,
                          parse_partition, parse_problem)
from pplp.instances import random_lp, split_problem
from pplp.linalg import gen_monomial
from pplp.protocols import (PartyShare, ProtocolConfig, ProtocolRun, homomorphic_right_mul,
                            multi_party_transform, two_party_transform_arbitrary,
                            two_party_transform_split)
from pplp.runtime import ProtocolError
from pplp.solver import Status, report_objective, simplex_solve

VARIANTS = ("alg2", "alg3", "alg4")


class CliError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    key_bits: int
    delta_exp: int
    coeff_max: int
    seed: int
    solver_party: int | None
    mode: str
    transcript: Path | None

    def protocol(self) -> ProtocolConfig:
        return ProtocolConfig(key_bits=self.key_bits, scale=ScaleConfig.from_exponent(self.delta_exp),
                              coeff_range=(1, self.coeff_max), mode=self.mode, solver=self.solver_party)


def _run_config(args) -> RunConfig:
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    return RunConfig(args.key_bits, args.delta_exp, args.coeff_max, seed, args.solver_party,
                     args.mode, Path(args.transcript) if args.transcript else None)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _status_line(status: Status, objective) -> str:
    if status is not Status.OPTIMAL:
        return str(status)
    return f"{status} obj={format_rational(objective)}"


# -- keygen ---------------------------------------------------------------

def cmd_keygen(args) -> list[str]:
    cfg = _run_config(args)
    kp = crypto.keygen(cfg.key_bits, random.Random(f"{cfg.seed}/keygen"))
    out = Path(args.out)
    pub, priv = out.with_name(out.name + ".pub"), out.with_name(out.name + ".key")
    try:
        pub.write_text(crypto.dump_public_key(kp.public_key))
        priv.write_text(crypto.dump_private_key(kp.private_key))
    except OSError as e:
        raise CliError(f"cannot write key files: {e.strerror}") from None
    return [f"key_id={kp.public_key.key_id} bits={kp.public_key.bits}", f"public={pub}", f"private={priv}"]


# -- solve ----------------------------------------------------------------

def cmd_solve(args) -> list[str]:
    p = parse_problem(_read(args.problem))
    sol = simplex_solve(p)
    line = _status_line(sol.status, report_objective(p, sol))
    if sol.status is Status.OPTIMAL:
        line += f" x={format_vector(sol.x)}"
    return [line]


# -- run ------------------------------------------------------------------

def _load_shares(text: str, parties: int, rng: random.Random) -> tuple[list[PartyShare], int]:
    if is_partition(text):
        return parse_partition(text)
    p = parse_problem(text)
    return split_problem(p, parties, rng), p.objective_sign


def _run_variant(variant: str, text: str, cfg: RunConfig, parties: int) -> tuple[ProtocolRun, int]:
    pcfg = cfg.protocol()
    rng = random.Random(f"{cfg.seed}/split")
    if variant == "alg2":
        if is_partition(text):
            shares, sign = parse_partition(text)
            if len(shares) != 2:
                raise CliError("alg2 needs exactly two shares")
            objective, constraints = shares
            if any(v for r in objective.M for v in r) or any(objective.b) or any(constraints.c):
                raise CliError("alg2 needs share 1 to hold only the objective and share 2 only the constraints")
            c, M, b = objective.c, constraints.M, constraints.b
        else:
            p = parse_problem(text)
            c, M, b, sign = p.c, p.M, p.b, p.objective_sign
        return two_party_transform_split(c, M, b, pcfg, seed=cfg.seed), sign
    if variant == "alg3":
        shares, sign = _load_shares(text, 2, rng)
        if len(shares) != 2:
            raise CliError("alg3 needs exactly two shares")
        return two_party_transform_arbitrary(shares[0], shares[1], pcfg, seed=cfg.seed), sign
    shares, sign = _load_shares(text, parties, rng)
    return multi_party_transform(shares, pcfg, seed=cfg.seed), sign


def cmd_run(args) -> list[str]:
    cfg = _run_config(args)
    run, sign = _run_variant(args.variant, _read(args.partition), cfg, args.parties)
    objective = None if run.objective is None else sign * run.objective
    lines = [_status_line(run.status, objective)]
    if run.status is Status.OPTIMAL:
        if cfg.mode == "reveal":
            lines.append(f"x={format_vector(run.x)}")
        else:
            for p, r in sorted(run.results.items()):
                lines.append(f"share P{p}: {format_vector(r.share)}")
    t = run.transcript
    if cfg.transcript:
        try:
            cfg.transcript.write_text(t.export())
        except OSError as e:
            raise CliError(f"cannot write transcript: {e.strerror}") from None
        lines.append(f"transcript={cfg.transcript} messages={len(t.messages)} sha256={t.digest()}")
    else:
        lines.append(f"messages={len(t.messages)} sha256={t.digest()}")
    return lines


# -- attack ---------------------------------------------------------------

def _format_candidate(q) -> list[str]:
    n = len(q.perm)
    rows = []
    for i, (j, c) in enumerate(zip(q.perm, q.coeffs)):
        cells = ["0"] * n
        cells[j] = "?" if c is None else format_rational(c)
        rows.append(" ".join(cells))
    return rows


def cmd_attack(args) -> list[str]:
    text = _read(args.input)
    first = next((ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")), [])
    if first and first[0] == "lp":
        cfg = _run_config(args)
        mode = "reveal" if args.scenario == "alg2" else "shares"
        cfg = RunConfig(cfg.key_bits, cfg.delta_exp, cfg.coeff_max, cfg.seed, cfg.solver_party, mode, None)
        run, _ = _run_variant(args.scenario, text, cfg, 2)
        attacker = args.attacker or 1
        result = audit_protocol_run(run.transcript, attacker, args.scenario)
    else:
        result = bednarz_enumerate(AttackInput(**parse_evidence(text)))
    return _attack_report(result, args.show)


def _attack_report(result: AttackResult, show: int) -> list[str]:
    k = len(result.candidates)
    lines = ["unique: true" if result.unique else f"unique: false, candidates={k}"]
    for idx, cand in enumerate(result.candidates[:show], 1):
        lines.append(f"candidate {idx}")
        lines += _format_candidate(cand)
    if k > show:
        lines.append(f"... {k - show} more")
    return lines


# -- bench ----------------------------------------------------------------

def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def cmd_bench(args) -> list[str]:
    cfg = _run_config(args)
    rng = random.Random(f"{cfg.seed}/bench")
    rows = ["operation\tkey_bits\tsize\tparties\tseconds"]
    for bits in args.bench_bits:
        kp_holder = []
        t = _timed(lambda: kp_holder.append(crypto.keygen(bits, rng)))
        rows.append(f"keygen\t{bits}\t-\t-\t{t:.6f}")
        pk = kp_holder[0].public_key
        for size in args.sizes:
            scale = ScaleConfig.from_exponent(cfg.delta_exp)
            p = random_lp(rng, size, size)
            enc = []
            t = _timed(lambda: enc.append(encrypt_matrix(p.M, 1, pk, scale, rng)))
            rows.append(f"encrypt_cell\t{bits}\t{size}\t-\t{t / (size * size):.6f}")
            q = gen_monomial(size, (1, cfg.coeff_max), rng)
            t = _timed(lambda: homomorphic_right_mul(enc[0], q, scale))
            rows.append(f"right_mul\t{bits}\t{size}\t-\t{t:.6f}")
            run_cfg = RunConfig(bits, cfg.delta_exp, cfg.coeff_max, cfg.seed, None, "reveal", None)
            pcfg = run_cfg.protocol()
            t = _timed(lambda: two_party_transform_split(p.c, p.M, p.b, pcfg, seed=cfg.seed))
            rows.append(f"alg2\t{bits}\t{size}\t2\t{t:.6f}")
            two = split_problem(p, 2, rng)
            t = _timed(lambda: two_party_transform_arbitrary(two[0], two[1], pcfg, seed=cfg.seed))
            rows.append(f"alg3\t{bits}\t{size}\t2\t{t:.6f}")
            many = split_problem(p, args.parties, rng)
            t = _timed(lambda: multi_party_transform(many, pcfg, seed=cfg.seed))
            rows.append(f"alg4\t{bits}\t{size}\t{args.parties}\t{t:.6f}")
    return rows


# -- parser ---------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--key-bits", type=int, default=crypto.DEFAULT_KEY_BITS)
    p.add_argument("--delta-exp", type=int, default=20)
    p.add_argument("--coeff-max", type=int, default=2 ** 16)
    p.add_argument("--seed", type=int, default=None, help="makes output reproducible (default: random)")
    p.add_argument("--solver-party", type=int, default=None,
                   help="solving party (default: P1; P2 for alg2, where the constraint holder solves)")
    p.add_argument("--mode", choices=("reveal", "shares"), default="reveal")
    p.add_argument("--transcript", default=None, help="write the message log here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pplp", description="Solve linear programs whose data is split across parties without pooling it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    _common(p)
    p.add_argument("--out", required=True, help="path prefix; writes <out>.pub and <out>.key")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("solve", help="solve a problem file centrally")
    p.add_argument("problem")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("run", help="run a secure transformation protocol")
    _common(p)
    p.add_argument("variant", choices=VARIANTS)
    p.add_argument("partition", help="partition file, or a problem file to split at random")
    p.add_argument("--parties", type=int, default=3, help="parties for alg4 when splitting a problem file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack", help="enumerate transformations consistent with disclosed data")
    _common(p)
    p.add_argument("scenario", choices=("alg2", "alg3"))
    p.add_argument("input", help="evidence file, or a problem/partition file to run and audit")
    p.add_argument("--attacker", type=int, default=None, help="party whose view is audited (default: P1)")
    p.add_argument("--show", type=int, default=1, help="candidates to print")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="time the building blocks and protocols (TSV)")
    _common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[4])
    p.add_argument("--bench-bits", type=int, nargs="+", default=[256, 512])
    p.add_argument("--parties", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lines = args.func(args)
    except (CliError, ParseError, EncodingError, ProtocolError, ValueError) as e:
        msg = " ".join(str(e).split())
        print(f"pplp {args.command}: error: {msg}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
