"""Permutation-enumeration attack on a disclosed monomial transformation.

Given the transformed objective ``c^T Q`` an adversary enumerates every
permutation and solves for the coefficients. With the original ``c`` each
permutation pins down ``q_i = (c^T Q)_{perm[i]} / c_i``, and a pair
``(y*, x* = Q y*)`` filters the survivors further. On generic data the true
``Q`` is the only survivor. Without ``c`` and ``x*`` nothing constrains the
permutation and all ``n!`` candidates remain.

Enumeration is a depth-first search over positions that prunes a partial
permutation as soon as one coefficient is non-positive or inconsistent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from pplp.linalg import MonomialMatrix, Vector, to_fraction, vector
from pplp.runtime import Transcript

MAX_DIM = 9
SCENARIOS = ("alg2", "alg3")


@dataclass(frozen=True)
class AttackInput:
    cTQ: Vector
    cT: Vector | None = None
    y_star: Vector | None = None
    x_star: Vector | None = None

    def __post_init__(self):
        n = len(self.cTQ)
        for name in ("cTQ", "cT", "y_star", "x_star"):
            v = getattr(self, name)
            if v is None:
                continue
            v = vector(v)
            if len(v) != n:
                raise ValueError(f"{name} has length {len(v)}, expected {n}")
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return len(self.cTQ)


@dataclass(frozen=True)
class Candidate:
    """A permutation consistent with the evidence; ``None`` marks an unconstrained coefficient."""

    perm: tuple[int, ...]
    coeffs: tuple[Fraction | None, ...]

    @property
    def determined(self) -> bool:
        return all(q is not None for q in self.coeffs)

    def monomial(self) -> MonomialMatrix:
        if not self.determined:
            raise ValueError("candidate has unconstrained coefficients")
        return MonomialMatrix(self.perm, self.coeffs)

    def matches(self, q: MonomialMatrix) -> bool:
        return self.perm == q.perm and all(a is None or a == b for a, b in zip(self.coeffs, q.coeffs))


@dataclass
class AttackResult:
    candidates: list[Candidate] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return len(self.candidates) == 1

    @property
    def recovered(self) -> MonomialMatrix | None:
        """The transformation, when it is pinned down completely."""
        if self.unique and self.candidates[0].determined:
            return self.candidates[0].monomial()
        return None


def _position_options(inp: AttackInput, i: int, j: int) -> tuple[bool, Fraction | None]:
    """Is mapping position ``i`` to column ``j`` consistent, and which coefficient does it force?"""
    forced = None
    target = inp.cTQ[j]
    if inp.cT is not None:
        if inp.cT[i] == 0:
            if target != 0:
                return False, None
        else:
            forced = target / inp.cT[i]
            if forced <= 0:
                return False, None
    if inp.y_star is not None and inp.x_star is not None:
        y, x = inp.y_star[j], inp.x_star[i]
        if y == 0:
            if x != 0:
                return False, None
        else:
            q = x / y
            if q <= 0 or (forced is not None and q != forced):
                return False, None
            forced = q
    return True, forced


def bednarz_enumerate(inp: AttackInput, max_dim: int = MAX_DIM) -> AttackResult:
    """All monomial transformations consistent with the supplied evidence."""
    n = inp.n
    if n < 1:
        raise ValueError("empty evidence")
    if n > max_dim:
        raise ValueError(f"dimension {n} exceeds the enumeration bound {max_dim}")
    table = [[_position_options(inp, i, j) for j in range(n)] for i in range(n)]
    out: list[Candidate] = []
    perm: list[int] = []
    coeffs: list[Fraction | None] = []
    used = [False] * n

    def dfs(i: int) -> None:
        if i == n:
            out.append(Candidate(tuple(perm), tuple(coeffs)))
            return
        for j in range(n):
            ok, q = table[i][j]
            if used[j] or not ok:
                continue
            used[j] = True
            perm.append(j)
            coeffs.append(q)
            dfs(i + 1)
            perm.pop()
            coeffs.pop()
            used[j] = False

    dfs(0)
    return AttackResult(out)


def _latest(t: Transcript, party: int, kinds: Sequence[str]):
    found = [m for m in t.received_by(party) if m.kind in kinds]
    return found[-1].decoded() if found else None


def _view_value(t: Transcript, party: int, category: str, tags: Sequence[str]):
    for tag in tags:
        entries = t.entries(party, category, tag)
        if entries:
            return entries[-1].value
    return None


def collect_evidence(t: Transcript, attacker: int, scenario: str) -> dict[str, Vector | None]:
    """What ``attacker`` can read about c, c^T Q, y* and x* from its own view."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    ev: dict[str, Vector | None] = {"cT": None, "cTQ": None, "y_star": None, "x_star": None}
    if scenario == "alg2":
        # only the objective holder in the split setting owns the whole c
        ev["cT"] = _view_value(t, attacker, "hold", ["c"])
    solution = _latest(t, attacker, ["recon_solution"])
    problem = _latest(t, attacker, ["transformed_problem"])
    ev["cTQ"] = _view_value(t, attacker, "decrypt", ["cQ"])
    if ev["cTQ"] is None and solution is not None:
        ev["cTQ"] = solution[3]
    if ev["cTQ"] is None and problem is not None:
        ev["cTQ"] = problem[1]
    ev["y_star"] = _view_value(t, attacker, "compute", ["y_star"])
    if ev["y_star"] is None and solution is not None:
        ev["y_star"] = solution[2]
    ev["x_star"] = _view_value(t, attacker, "decrypt", ["x_star"]) or \
        _view_value(t, attacker, "compute", ["x_star"]) or _latest(t, attacker, ["recon_x"])
    return {k: None if v is None else [to_fraction(x) for x in v] for k, v in ev.items()}


def audit_protocol_run(t: Transcript, attacker: int, scenario: str,
                       leak: Mapping[str, Sequence] | None = None) -> AttackResult:
    """Run the attack on exactly what ``attacker`` saw, plus any ``leak`` injected on top.

    ``leak`` maps evidence names (``cT``, ``y_star``, ``x_star``) to vectors
    the attacker would not normally have.
    """
    ev = collect_evidence(t, attacker, scenario)
    for k, v in (leak or {}).items():
        if k not in ev:
            raise ValueError(f"unknown evidence name {k!r}")
        ev[k] = list(v)
    if ev["cTQ"] is None:
        raise ValueError(f"P{attacker} never saw the transformed objective")
    return bednarz_enumerate(AttackInput(**ev))
