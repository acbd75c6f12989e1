"""Signed fixed-point embedding of rationals into Z_n.

A rational ``q`` at scale exponent ``e`` is stored as the integer
``q * delta**e``; negative values wrap to ``n + q * delta**e``. Residues below
``n/2`` decode as non-negative. ``delta`` is a power of two, so decoding is an
exact division and nothing is ever rounded.

Multiplying a ciphertext at exponent ``a`` by a plaintext at exponent ``b``
yields exponent ``a + b``. Monomial coefficients are integers at exponent 0,
so right-multiplying by them leaves the exponent unchanged.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from pplp import crypto
from pplp.crypto import Ciphertext, PrivateKey, PublicKey
from pplp.linalg import Matrix, to_fraction


class EncodingError(ValueError):
    """Value cannot be embedded at the requested scale."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        if position is not None:
            message = f"entry {position}: {message}"
        super().__init__(message)
        self.position = position


class ScaleOverflowError(EncodingError):
    """The plaintext space is too small for the worst-case magnitude."""


@dataclass(frozen=True)
class ScaleConfig:
    delta: int = 2 ** 20
    max_exp: int = 3
    max_magnitude: int = 2 ** 20

    def __post_init__(self):
        if self.delta < 2 or self.delta & (self.delta - 1):
            raise ValueError("delta must be a power of two")
        if self.max_exp < 1:
            raise ValueError("max_exp must be positive")

    @classmethod
    def from_exponent(cls, delta_exp: int, **kw) -> ScaleConfig:
        return cls(delta=2 ** delta_exp, **kw)

    def scale(self, e: int) -> int:
        return self.delta ** e


def _n(key) -> int:
    return key.n if hasattr(key, "n") else int(key)


def scaled_integer(q, e: int, cfg: ScaleConfig) -> int:
    """``q * delta**e`` as an int, or EncodingError if ``q`` is not on that grid."""
    v = to_fraction(q) * cfg.scale(e)
    if v.denominator != 1:
        raise EncodingError(f"{q} is not representable with denominator delta^{e}")
    return v.numerator


def encode_int(v: int, pk: PublicKey) -> int:
    n = _n(pk)
    if 2 * abs(v) >= n:
        raise ScaleOverflowError(f"|{v}| does not fit below n/2")
    return v % n


def decode_int(residue: int, pk) -> int:
    n = _n(pk)
    if not 0 <= residue < n:
        raise ValueError("residue outside [0, n)")
    return residue if 2 * residue < n else residue - n


def encode_signed(q, e: int, pk, cfg: ScaleConfig) -> int:
    return encode_int(scaled_integer(q, e, cfg), pk)


def decode_signed(v: int, e: int, pk, cfg: ScaleConfig) -> Fraction:
    return Fraction(decode_int(v, pk), cfg.scale(e))


@dataclass(frozen=True)
class CipherMatrix:
    """Row-major grid of ciphertexts sharing one key and one scale exponent."""

    cells: tuple[tuple[Ciphertext, ...], ...]
    scale_exp: int
    public_key: PublicKey

    def __post_init__(self):
        cells = tuple(tuple(r) for r in self.cells)
        if not cells or not cells[0] or any(len(r) != len(cells[0]) for r in cells):
            raise ValueError("cipher matrix must be non-empty and rectangular")
        if any(c.key_id != self.public_key.key_id for r in cells for c in r):
            raise crypto.KeyMismatchError("all cells must share the matrix key")
        object.__setattr__(self, "cells", cells)

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0])

    @property
    def key_id(self) -> str:
        return self.public_key.key_id

    def __add__(self, other: CipherMatrix) -> CipherMatrix:
        return add_matrices(self, other)


def encrypt_matrix(m: Matrix, e: int, pk: PublicKey, cfg: ScaleConfig,
                   rng: random.Random) -> CipherMatrix:
    """Encode every entry at exponent ``e`` and encrypt it with a fresh nonce."""
    if e > cfg.max_exp:
        raise ScaleOverflowError(f"scale exponent {e} exceeds max_exp {cfg.max_exp}")
    rows = []
    for i, r in enumerate(m):
        out = []
        for j, q in enumerate(r):
            try:
                v = encode_signed(q, e, pk, cfg)
            except EncodingError as err:
                raise type(err)(str(err), (i, j)) from None
            out.append(crypto.encrypt_random(pk, v, rng))
        rows.append(out)
    return CipherMatrix(rows, e, pk)


def decrypt_matrix(c: CipherMatrix, sk: PrivateKey, cfg: ScaleConfig) -> Matrix:
    if c.key_id != sk.key_id:
        raise crypto.KeyMismatchError("cipher matrix was not produced under this key")
    if c.scale_exp > cfg.max_exp:
        raise ScaleOverflowError(f"scale exponent {c.scale_exp} exceeds max_exp {cfg.max_exp}")
    return [[decode_signed(crypto.decrypt(sk, x), c.scale_exp, sk.public_key, cfg) for x in r]
            for r in c.cells]


def add_matrices(a: CipherMatrix, b: CipherMatrix) -> CipherMatrix:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError("dimension mismatch")
    if a.scale_exp != b.scale_exp:
        raise EncodingError(f"cannot add exponents {a.scale_exp} and {b.scale_exp}")
    cells = [[crypto.add_cipher(x, y) for x, y in zip(r, s)] for r, s in zip(a.cells, b.cells)]
    return CipherMatrix(cells, a.scale_exp, a.public_key)


def check_capacity(pk, cfg: ScaleConfig, n_dim: int, coeff_max: int,
                   coeff_power: int | None = None, max_magnitude: int | None = None) -> int:
    """Abort unless the worst-case encoded magnitude stays below n/2.

    The bound is ``delta**max_exp * max_magnitude * n_dim * coeff_max**coeff_power``
    with ``coeff_power`` defaulting to ``max_exp``; protocols that chain more
    monomial factors pass the chain length. Returns the bound.
    """
    power = cfg.max_exp if coeff_power is None else max(cfg.max_exp, coeff_power)
    mag = cfg.max_magnitude if max_magnitude is None else max_magnitude
    bound = cfg.scale(cfg.max_exp) * mag * n_dim * coeff_max ** power
    if 2 * bound >= _n(pk):
        raise ScaleOverflowError(
            f"worst-case magnitude 2^{bound.bit_length()} does not fit a "
            f"{_n(pk).bit_length()}-bit plaintext space")
    return bound


def check_magnitudes(m: Matrix, cfg: ScaleConfig, what: str = "input") -> None:
    for i, r in enumerate(m):
        for j, q in enumerate(r):
            if abs(q) > cfg.max_magnitude:
                raise ScaleOverflowError(f"{what} magnitude {q} exceeds {cfg.max_magnitude}", (i, j))


def encode_rational_mod(q, pk) -> int:
    """``numerator * denominator^-1 mod n``; integer scalings then act exactly on q."""
    q = to_fraction(q)
    n = _n(pk)
    try:
        inv = pow(q.denominator, -1, n)
    except ValueError:
        raise EncodingError(f"denominator of {q} shares a factor with the modulus") from None
    return q.numerator * inv % n


def rational_bounds(pk, reserve_bits: int = 40) -> tuple[int, int]:
    """(numerator bound, denominator bound) for :func:`rational_reconstruct`.

    Their product stays ``reserve_bits`` below n, so a residue that does not
    encode a small rational is recognised as such except with probability
    about 2**-reserve_bits.
    """
    usable = _n(pk).bit_length() - 1 - reserve_bits
    if usable < 16:
        raise ScaleOverflowError("modulus too small for rational recovery")
    den_bits = usable // 4
    return 2 ** (usable - den_bits - 1), 2 ** den_bits


def rational_reconstruct(u: int, pk, num_bound: int, den_bound: int) -> Fraction:
    """The unique ``a/b`` with ``|a| <= num_bound``, ``0 < b <= den_bound`` and ``a = b*u mod n``.

    Raises ScaleOverflowError when no such fraction exists.
    """
    n = _n(pk)
    if 2 * num_bound * den_bound >= n:
        raise ValueError("bounds too large for a unique reconstruction")
    r0, r1 = n, u % n
    t0, t1 = 0, 1
    while r1 > num_bound:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        t0, t1 = t1, t0 - k * t1
    if t1 == 0 or abs(t1) > den_bound or math.gcd(r1, abs(t1)) != 1:
        raise ScaleOverflowError("residue does not encode a rational within the recovery bounds")
    return Fraction(r1 if t1 > 0 else -r1, abs(t1))
