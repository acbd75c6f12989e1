"""Bit-exact payload codec for protocol messages.

Every value is a one-byte tag followed by length-prefixed big-endian fields,
so equal objects always serialize to equal bytes and transcripts can be
hashed. Supported values: None, bool, int, Fraction, str, tuples/lists
(decoded as tuples), PublicKey and CipherMatrix.
"""
from __future__ import annotations

import struct
from fractions import Fraction
from typing import Any, Iterator

from pplp.crypto import Ciphertext, PublicKey
from pplp.encoding import CipherMatrix


def _uint(v: int) -> bytes:
    raw = v.to_bytes((v.bit_length() + 7) // 8, "big")
    return struct.pack(">I", len(raw)) + raw


def _int(v: int) -> bytes:
    return (b"-" if v < 0 else b"+") + _uint(abs(v))


def encode(obj: Any) -> bytes:
    if obj is None:
        return b"N"
    if isinstance(obj, bool):
        return b"B" + (b"\x01" if obj else b"\x00")
    if isinstance(obj, int):
        return b"I" + _int(obj)
    if isinstance(obj, Fraction):
        return b"Q" + _int(obj.numerator) + _uint(obj.denominator)
    if isinstance(obj, str):
        raw = obj.encode()
        return b"S" + struct.pack(">I", len(raw)) + raw
    if isinstance(obj, (list, tuple)):
        return b"L" + struct.pack(">I", len(obj)) + b"".join(encode(x) for x in obj)
    if isinstance(obj, PublicKey):
        return b"K" + _uint(obj.n)
    if isinstance(obj, CipherMatrix):
        head = b"C" + _uint(obj.public_key.n) + struct.pack(">III", obj.rows, obj.cols, obj.scale_exp)
        return head + b"".join(_uint(c.value) for r in obj.cells for c in r)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise ValueError("truncated payload")
        out = self.data[self.pos:self.pos + k]
        self.pos += k
        return out

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def uint(self) -> int:
        return int.from_bytes(self.take(self.u32()), "big")

    def int(self) -> int:
        sign = self.take(1)
        v = self.uint()
        return -v if sign == b"-" else v

    def value(self) -> Any:
        tag = self.take(1)
        if tag == b"N":
            return None
        if tag == b"B":
            return self.take(1) == b"\x01"
        if tag == b"I":
            return self.int()
        if tag == b"Q":
            num = self.int()
            return Fraction(num, self.uint())
        if tag == b"S":
            return self.take(self.u32()).decode()
        if tag == b"L":
            return tuple(self.value() for _ in range(self.u32()))
        if tag == b"K":
            return PublicKey(self.uint())
        if tag == b"C":
            pk = PublicKey(self.uint())
            rows, cols, exp = struct.unpack(">III", self.take(12))
            cells = [[Ciphertext(self.uint(), pk) for _ in range(cols)] for _ in range(rows)]
            return CipherMatrix(cells, exp, pk)
        raise ValueError(f"unknown tag {tag!r}")


def decode(data: bytes) -> Any:
    r = _Reader(data)
    out = r.value()
    if r.pos != len(data):
        raise ValueError("trailing bytes in payload")
    return out


def plaintext_values(obj: Any) -> Iterator[int | Fraction]:
    """Yield every number readable without a private key.

    Ciphertexts and public keys are opaque; strings are protocol labels.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, PublicKey, CipherMatrix)):
        return
    if isinstance(obj, (int, Fraction)):
        yield obj
    elif isinstance(obj, (list, tuple)):
        for x in obj:
            yield from plaintext_values(x)
