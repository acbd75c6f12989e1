"""Line-oriented text formats for problems, partitions and attack evidence.

Problem file::

    lp 3 2 min
    -3 -5
    1 0 <= 4
    0 2 <= 12
    3 2 <= 18

Rationals are written as integers or ``p/q``. Blank lines and ``#`` comments
are ignored. A partition file repeats the body under ``share <k>`` headers
after the ``lp`` line; a share lists either every constraint row or none,
in which case its matrix and right-hand side are zero. Evidence files hold ``key: values`` lines for
``cT``, ``cTQ``, ``y`` and ``x``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from pplp.protocols.common import PartyShare
from pplp.solver import LpProblem, RawProblem, canonicalize

RELATIONS = ("<=", ">=")
EVIDENCE_KEYS = {"cT": "cT", "cTQ": "cTQ", "y": "y_star", "x": "x_star"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_vector(v: Iterable) -> str:
    return " ".join(format_rational(x) for x in v)


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if raw:
            out.append((no, raw.split()))
    return out


def _rational(tok: str, line: int) -> Fraction:
    try:
        if "." in tok or "e" in tok.lower():
            raise ValueError
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational: {tok!r}", line) from None


def _header(lines, text_kind: str) -> tuple[int, int, str, int]:
    if not lines:
        raise ParseError(f"empty {text_kind} file", 1)
    no, toks = lines[0]
    if len(toks) != 4 or toks[0] != "lp" or toks[3] not in ("min", "max"):
        raise ParseError("expected header 'lp <m> <n> min|max'", no)
    try:
        m, n = int(toks[1]), int(toks[2])
    except ValueError:
        raise ParseError("dimensions must be integers", no) from None
    if m < 1 or n < 1:
        raise ParseError("dimensions must be positive", no)
    return m, n, toks[3], no


def _objective(no: int, toks: list[str], n: int) -> list[Fraction]:
    if len(toks) != n:
        raise ParseError(f"objective needs {n} coefficients, got {len(toks)}", no)
    return [_rational(t, no) for t in toks]


def _constraint(no: int, toks: list[str], n: int) -> tuple[list[Fraction], str, Fraction]:
    if len(toks) != n + 2 or toks[n] not in RELATIONS:
        raise ParseError(f"constraint needs {n} coefficients, a relation (<= or >=) and a right-hand side", no)
    return [_rational(t, no) for t in toks[:n]], toks[n], _rational(toks[n + 1], no)


def parse_raw_problem(text: str) -> RawProblem:
    lines = _lines(text)
    m, n, sense, hno = _header(lines, "problem")
    body = lines[1:]
    if not body:
        raise ParseError("missing objective line", hno + 1)
    c = _objective(*body[0], n)
    rows = [_constraint(no, toks, n) for no, toks in body[1:]]
    if len(rows) != m:
        last = body[-1][0]
        raise ParseError(f"expected {m} constraint rows, got {len(rows)}", last)
    return RawProblem(c, [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows], sense)


def parse_problem(text: str) -> LpProblem:
    return canonicalize(parse_raw_problem(text))


def format_problem(p: LpProblem) -> str:
    m, n = len(p.M), len(p.c)
    sense = "min" if p.objective_sign == 1 else "max"
    c = p.c if p.objective_sign == 1 else [-x for x in p.c]
    out = [f"lp {m} {n} {sense}", format_vector(c)]
    out += [f"{format_vector(r)} <= {format_rational(b)}" for r, b in zip(p.M, p.b)]
    return "\n".join(out) + "\n"


def parse_partition(text: str) -> tuple[list[PartyShare], int]:
    """Shares in party order plus the objective sign (-1 for max).

    Relations must agree across shares; ``>=`` rows are negated and a max
    objective is negated into a min.
    """
    lines = _lines(text)
    m, n, sense, _ = _header(lines, "partition")
    sections: dict[int, list[tuple[int, list[str]]]] = {}
    current = None
    for no, toks in lines[1:]:
        if toks[0] == "share":
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected 'share <party-index>'", no)
            current = int(toks[1])
            if current in sections:
                raise ParseError(f"duplicate share {current}", no)
            sections[current] = []
        elif current is None:
            raise ParseError("data before the first 'share' header", no)
        else:
            sections[current].append((no, toks))
    if not sections:
        raise ParseError("no shares found", lines[0][0])
    if sorted(sections) != list(range(1, len(sections) + 1)):
        raise ParseError(f"shares must be numbered 1..{len(sections)}", lines[0][0])
    sign = 1 if sense == "min" else -1
    relations: list[str | None] = [None] * m
    shares = []
    for k in sorted(sections):
        body = sections[k]
        if not body:
            raise ParseError(f"share {k} has no objective line", lines[0][0])
        c = [sign * x for x in _objective(*body[0], n)]
        rows = body[1:]
        if rows and len(rows) != m:
            raise ParseError(f"share {k} needs 0 or {m} constraint rows, got {len(rows)}", rows[-1][0])
        M = [[Fraction(0)] * n for _ in range(m)]
        b = [Fraction(0)] * m
        for i, (no, toks) in enumerate(rows):
            coeffs, rel, rhs = _constraint(no, toks, n)
            if relations[i] is not None and relations[i] != rel:
                raise ParseError(f"row {i + 1} relation differs from an earlier share", no)
            relations[i] = rel
            flip = -1 if rel == ">=" else 1
            M[i] = [flip * x for x in coeffs]
            b[i] = flip * rhs
        shares.append(PartyShare(M, c, b))
    # omitted rows are zero, so negating a >= row never touches them
    return shares, sign


def is_partition(text: str) -> bool:
    return any(toks[0] == "share" for _, toks in _lines(text))


def format_partition(shares: Sequence[PartyShare]) -> str:
    m, n = shares[0].shape
    out = [f"lp {m} {n} min"]
    for k, s in enumerate(shares, 1):
        out.append(f"share {k}")
        out.append(format_vector(s.c))
        out += [f"{format_vector(r)} <= {format_rational(b)}" for r, b in zip(s.M, s.b)]
    return "\n".join(out) + "\n"


def parse_evidence(text: str) -> dict[str, list[Fraction]]:
    """Keyed vectors, e.g. ``cTQ: 3 1/2 7``; returns AttackInput keyword names."""
    out: dict[str, list[Fraction]] = {}
    width = None
    for no, toks in _lines(text):
        key = toks[0].rstrip(":")
        if key not in EVIDENCE_KEYS:
            raise ParseError(f"unknown evidence key {key!r}; expected one of {sorted(EVIDENCE_KEYS)}", no)
        name = EVIDENCE_KEYS[key]
        if name in out:
            raise ParseError(f"duplicate key {key!r}", no)
        values = [_rational(t, no) for t in toks[1:]]
        if not values:
            raise ParseError(f"{key} has no values", no)
        if width is not None and len(values) != width:
            raise ParseError(f"{key} has {len(values)} values, expected {width}", no)
        width = len(values)
        out[name] = values
    if "cTQ" not in out:
        raise ParseError("evidence must contain a cTQ line", None)
    return out


def format_evidence(ev: dict[str, Sequence]) -> str:
    inverse = {v: k for k, v in EVIDENCE_KEYS.items()}
    return "".join(f"{inverse[k]}: {format_vector(v)}\n" for k, v in ev.items() if v is not None)
