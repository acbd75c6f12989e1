"""Homomorphic building blocks shared by every transformation protocol."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from pplp import crypto
from pplp.crypto import DEFAULT_KEY_BITS, PublicKey
from pplp.encoding import (CipherMatrix, EncodingError, ScaleConfig, ScaleOverflowError,
                           add_matrices, check_capacity, check_magnitudes, encode_int,
                           encrypt_matrix, scaled_integer)
from pplp.linalg import Matrix, MonomialMatrix, Vector, matrix, vector, zeros
from pplp.runtime import Transcript
from pplp.solver import Status

MODES = ("reveal", "shares")


@dataclass(frozen=True)
class ProtocolConfig:
    key_bits: int = DEFAULT_KEY_BITS
    scale: ScaleConfig = field(default_factory=ScaleConfig)
    coeff_range: tuple[int, int] = (1, 2 ** 16)
    data_exp: int = 1
    mode: str = "reveal"
    solver: int | None = None
    zero_masks: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        lo, hi = self.coeff_range
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid coefficient range [{lo}, {hi}]")
        if not 0 <= self.data_exp <= self.scale.max_exp:
            raise ValueError("data_exp must lie in [0, max_exp]")

    @property
    def coeff_max(self) -> int:
        return self.coeff_range[1]


@dataclass(frozen=True)
class PartyShare:
    """One party's additive share of the LP plus its optional private monomial factor."""

    M: Matrix
    c: Vector
    b: Vector
    q: MonomialMatrix | None = None

    def __post_init__(self):
        object.__setattr__(self, "M", matrix(self.M))
        object.__setattr__(self, "c", vector(self.c))
        object.__setattr__(self, "b", vector(self.b))
        if len(self.c) != len(self.M[0]) or len(self.b) != len(self.M):
            raise ValueError("share dimensions are inconsistent")
        if self.q is not None and self.q.dim != len(self.c):
            raise ValueError("monomial factor does not match the variable count")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.M), len(self.c)


def check_shares(shares) -> tuple[int, int]:
    shapes = {s.shape for s in shares}
    if len(shapes) != 1:
        raise ValueError(f"shares disagree on dimensions: {sorted(shapes)}")
    return shapes.pop()


@dataclass(frozen=True)
class TransformedProblem:
    MQ: Matrix
    cQ: Vector
    b: Vector
    solver_party: int


@dataclass(frozen=True)
class PartyResult:
    status: Status
    objective: Fraction | None = None
    x: Vector | None = None
    share: Vector | None = None


@dataclass
class ProtocolRun:
    results: dict[int, PartyResult]
    transcript: Transcript
    outputs: dict[int, dict[str, Any]]
    transformed: TransformedProblem | None = None

    @property
    def status(self) -> Status:
        return next(iter(self.results.values())).status

    @property
    def objective(self) -> Fraction | None:
        return next(iter(self.results.values())).objective

    @property
    def x(self) -> Vector | None:
        """Revealed solution, or the sum of all shares in shares mode."""
        first = next(iter(self.results.values()))
        if first.x is not None:
            return first.x
        shares = [r.share for r in self.results.values() if r.share is not None]
        if not shares:
            return None
        return [sum(col, Fraction(0)) for col in zip(*shares)]


def monomial_wire(q: MonomialMatrix) -> tuple:
    return (q.perm, q.coeffs)


def _coeff_exponent(q: Fraction, plain_exp: int, cfg: ScaleConfig) -> int:
    if plain_exp == 0:
        if q.denominator != 1:
            raise EncodingError(f"coefficient {q} is not an integer")
        return q.numerator
    return scaled_integer(q, plain_exp, cfg)


def encrypt_mask_into(c: CipherMatrix, mask: Matrix, cfg: ScaleConfig, rng: random.Random) -> CipherMatrix:
    return add_matrices(c, encrypt_matrix(mask, c.scale_exp, c.public_key, cfg, rng))


def homomorphic_right_mul(c: CipherMatrix, q: MonomialMatrix, cfg: ScaleConfig,
                          rng: random.Random | None = None, mask: Matrix | None = None,
                          plain_exp: int = 0) -> CipherMatrix:
    """Encrypted ``M @ Q (+ mask)`` computed by whoever holds ``Q`` in plaintext.

    Each output cell costs one ciphertext exponentiation; the mask, when
    given, is encrypted with fresh nonces at the result exponent and added.
    """
    if q.dim != c.cols:
        raise ValueError(f"dimension mismatch: {c.rows}x{c.cols} times {q.dim}x{q.dim}")
    exp = c.scale_exp + plain_exp
    if exp > cfg.max_exp:
        raise ScaleOverflowError(f"result exponent {exp} exceeds max_exp {cfg.max_exp}")
    rows = []
    for r in c.cells:
        out = [None] * q.dim
        for i, (j, coeff) in enumerate(zip(q.perm, q.coeffs)):
            out[j] = crypto.scalar_mul(r[i], _coeff_exponent(coeff, plain_exp, cfg))
        rows.append(out)
    result = CipherMatrix(rows, exp, c.public_key)
    if mask is not None:
        if rng is None:
            raise ValueError("masking needs an entropy source")
        result = encrypt_mask_into(result, mask, cfg, rng)
    return result


def homomorphic_apply_vec(q: MonomialMatrix, c: CipherMatrix, cfg: ScaleConfig) -> CipherMatrix:
    """Encrypted ``Q @ v`` for an encrypted column vector ``v`` (shape n x 1)."""
    if c.cols != 1 or c.rows != q.dim:
        raise ValueError("expected an encrypted column vector matching the monomial dimension")
    cells = [[crypto.scalar_mul(c.cells[j][0], _coeff_exponent(coeff, 0, cfg))]
             for j, coeff in zip(q.perm, q.coeffs)]
    return CipherMatrix(cells, c.scale_exp, c.public_key)


def homomorphic_vec_mat(v: Vector, c: CipherMatrix, v_exp: int, cfg: ScaleConfig) -> CipherMatrix:
    """Encrypted ``v^T C`` for plaintext row ``v`` and encrypted dense ``C``."""
    if len(v) != c.rows:
        raise ValueError("dimension mismatch")
    exp = c.scale_exp + v_exp
    if exp > cfg.max_exp:
        raise ScaleOverflowError(f"result exponent {exp} exceeds max_exp {cfg.max_exp}")
    pk = c.public_key
    ks = [encode_int(scaled_integer(x, v_exp, cfg), pk) for x in v]
    out = []
    for j in range(c.cols):
        acc = crypto.Ciphertext(1, pk)     # trivial encryption of zero
        for k, x in enumerate(ks):
            acc = crypto.add_cipher(acc, crypto.scalar_mul(c.cells[k][j], x))
        out.append(acc)
    return CipherMatrix([out], exp, pk)


def mask_bound(moduli: Sequence[int], reserved: int, count: int) -> int:
    """Largest integer mask magnitude such that ``count`` masks plus a value of
    magnitude ``reserved`` stay strictly below n/2 for every modulus."""
    half = min(moduli) // 2 - 1 - reserved
    if count <= 0:
        return half
    bound = half // count
    if bound < 1:
        raise ScaleOverflowError("no room left in the plaintext space for masks")
    return bound


def sample_mask(rows: int, cols: int, bound: int, exp: int, cfg: ScaleConfig,
                rng: random.Random, zero: bool = False) -> Matrix:
    """Uniform mask with integer numerators in [-bound, bound] over delta**exp."""
    if zero:
        return zeros(rows, cols)
    d = cfg.scale(exp)
    return [[Fraction(rng.randint(-bound, bound), d) for _ in range(cols)] for _ in range(rows)]


def net_mask_offsets(masks: Mapping[tuple[int, int], Matrix], parties: Sequence[int]) -> dict[int, Matrix]:
    """Per-party net mask in the published shares.

    ``masks[(i, j)]`` is the mask party j added to party i's share. Party i's
    published share carries ``sum_j masks[(i, j)] - sum_j masks[(j, i)]``;
    the offsets sum to zero across parties.
    """
    some = next(iter(masks.values()))
    out = {}
    for i in parties:
        acc = zeros(len(some), len(some[0]))
        for (a, b), r in masks.items():
            if a == i:
                acc = [[x + y for x, y in zip(u, v)] for u, v in zip(acc, r)]
            if b == i:
                acc = [[x - y for x, y in zip(u, v)] for u, v in zip(acc, r)]
        out[i] = acc
    return out


def solver_of(cfg: ProtocolConfig, parties: Sequence[int], default: int) -> int:
    solver = default if cfg.solver is None else cfg.solver
    if solver not in parties:
        raise ValueError(f"solver P{solver} is not a protocol party")
    return solver


def keygen_for(ctx, cfg: ProtocolConfig) -> crypto.KeyPair:
    return crypto.keygen(cfg.key_bits, ctx.rng)


def check_inputs(cfg: ProtocolConfig, *mats: Matrix) -> None:
    """Reject data that is off the delta grid or larger than the public magnitude bound."""
    for m in mats:
        check_magnitudes(m, cfg.scale)
        for i, r in enumerate(m):
            for j, q in enumerate(r):
                try:
                    scaled_integer(q, cfg.data_exp, cfg.scale)
                except EncodingError as e:
                    raise EncodingError(str(e), (i, j)) from None


def data_bound(cfg: ProtocolConfig, chain_length: int, summands: int = 1) -> int:
    """Public bound on |entry| (in delta**data_exp units) after a monomial chain."""
    return summands * cfg.scale.max_magnitude * cfg.scale.scale(cfg.data_exp) * cfg.coeff_max ** chain_length


def check_key_capacity(pk: PublicKey, cfg: ProtocolConfig, n_dim: int, chain_length: int) -> None:
    check_capacity(pk, cfg.scale, n_dim, cfg.coeff_max, coeff_power=chain_length)
