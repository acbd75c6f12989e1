"""Paillier cryptosystem with the simplified generator g = n + 1.

Plaintexts live in Z_n. Multiplying two ciphertexts adds the plaintexts and
raising a ciphertext to an integer power scales the plaintext, which is all
the transformation protocols need.

Every randomized function takes an explicit ``random.Random`` instance.
Seeded generators give reproducible test runs; pass ``random.SystemRandom()``
for real keys.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

MIN_KEY_BITS = 128
DEFAULT_KEY_BITS = 2048
MILLER_RABIN_ROUNDS = 64

_SMALL_PRIMES = [p for p in range(3, 1000) if all(p % d for d in range(2, math.isqrt(p) + 1))]


class KeyMismatchError(ValueError):
    """A ciphertext was combined with, or decrypted under, a foreign key."""


class NonceError(ValueError):
    """Encryption nonce outside (0, n) or sharing a factor with n."""


def key_id_for(n: int) -> str:
    return hashlib.sha256(str(n).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PublicKey:
    n: int
    key_id: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.key_id:
            object.__setattr__(self, "key_id", key_id_for(self.n))

    @property
    def g(self) -> int:
        return self.n + 1

    @property
    def nsquare(self) -> int:
        return self.n * self.n

    @property
    def bits(self) -> int:
        return self.n.bit_length()


@dataclass(frozen=True)
class PrivateKey:
    public_key: PublicKey
    lambda_: int
    mu: int

    @property
    def key_id(self) -> str:
        return self.public_key.key_id

    @property
    def n(self) -> int:
        return self.public_key.n


@dataclass(frozen=True)
class KeyPair:
    public_key: PublicKey
    private_key: PrivateKey


@dataclass(frozen=True)
class Ciphertext:
    value: int
    public_key: PublicKey

    def __post_init__(self):
        if not 0 <= self.value < self.public_key.nsquare:
            raise ValueError("ciphertext value outside [0, n^2)")

    @property
    def key_id(self) -> str:
        return self.public_key.key_id

    def __add__(self, other: Ciphertext) -> Ciphertext:
        return add_cipher(self, other)

    def __mul__(self, k: int) -> Ciphertext:
        return scalar_mul(self, k)

    __rmul__ = __mul__


def is_probable_prime(n: int, rng: random.Random, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    # top two bits set so that the product of two such primes has exactly 2*bits bits
    while True:
        candidate = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
        if is_probable_prime(candidate, rng):
            return candidate


def keygen(bits: int = DEFAULT_KEY_BITS, rng: random.Random | None = None) -> KeyPair:
    """Generate a Paillier key pair whose modulus has exactly ``bits`` bits.

    Args:
        bits: modulus size; must be even and at least ``MIN_KEY_BITS``.
        rng: entropy source; defaults to ``random.SystemRandom()``.
    """
    if bits < MIN_KEY_BITS:
        raise ValueError(f"key size {bits} below the {MIN_KEY_BITS}-bit floor")
    if bits % 2:
        raise ValueError("key size must be even")
    rng = rng if rng is not None else random.SystemRandom()
    half = bits // 2
    p = random_prime(half, rng)
    q = random_prime(half, rng)
    while q == p:
        q = random_prime(half, rng)
    n = p * q
    lam = math.lcm(p - 1, q - 1)
    # with g = n + 1, L(g^lambda mod n^2) = lambda mod n
    mu = pow(lam, -1, n)
    pk = PublicKey(n)
    return KeyPair(pk, PrivateKey(pk, lam, mu))


def random_nonce(pk: PublicKey, rng: random.Random) -> int:
    while True:
        r = rng.randrange(1, pk.n)
        if math.gcd(r, pk.n) == 1:
            return r


def encrypt(pk: PublicKey, m: int, nonce: int) -> Ciphertext:
    if not 0 <= m < pk.n:
        raise ValueError("plaintext outside [0, n)")
    if not 0 < nonce < pk.n or math.gcd(nonce, pk.n) != 1:
        raise NonceError("nonce must lie in (0, n) and be coprime to n")
    nsq = pk.nsquare
    # (n+1)^m = 1 + m*n  (mod n^2)
    return Ciphertext((1 + m * pk.n) * pow(nonce, pk.n, nsq) % nsq, pk)


def encrypt_random(pk: PublicKey, m: int, rng: random.Random) -> Ciphertext:
    return encrypt(pk, m, random_nonce(pk, rng))


def decrypt(sk: PrivateKey, c: Ciphertext) -> int:
    if c.key_id != sk.key_id:
        raise KeyMismatchError("ciphertext was not produced under this key")
    n = sk.n
    u = pow(c.value, sk.lambda_, n * n)
    return (u - 1) // n * sk.mu % n


def _same_key(a: Ciphertext, b: Ciphertext) -> None:
    if a.key_id != b.key_id:
        raise KeyMismatchError("ciphertexts under different keys")


def add_cipher(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    _same_key(a, b)
    return Ciphertext(a.value * b.value % a.public_key.nsquare, a.public_key)


def scalar_mul(c: Ciphertext, k: int) -> Ciphertext:
    pk = c.public_key
    return Ciphertext(pow(c.value, k % pk.n, pk.nsquare), pk)


def rerandomize(c: Ciphertext, rng: random.Random) -> Ciphertext:
    pk = c.public_key
    r = pow(random_nonce(pk, rng), pk.n, pk.nsquare)
    return Ciphertext(c.value * r % pk.nsquare, pk)


# key files: one ``name=value`` field per line, decimal integers

def dump_public_key(pk: PublicKey) -> str:
    return f"n={pk.n}\nkey_id={pk.key_id}\n"


def dump_private_key(sk: PrivateKey) -> str:
    return f"n={sk.n}\nlambda={sk.lambda_}\nmu={sk.mu}\nkey_id={sk.key_id}\n"


def _fields(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected name=value")
        out[name.strip()] = value.strip()
    return out


def _checked_public(f: dict[str, str]) -> PublicKey:
    try:
        pk = PublicKey(int(f["n"]))
    except KeyError:
        raise ValueError("key file lacks n") from None
    if "key_id" in f and f["key_id"] != pk.key_id:
        raise ValueError("key_id does not match modulus")
    return pk


def load_public_key(text: str) -> PublicKey:
    return _checked_public(_fields(text))


def load_private_key(text: str) -> PrivateKey:
    f = _fields(text)
    pk = _checked_public(f)
    try:
        return PrivateKey(pk, int(f["lambda"]), int(f["mu"]))
    except KeyError as e:
        raise ValueError(f"key file lacks {e.args[0]}") from None
