"""Deterministic in-process execution of multi-party protocols.

A party program is a generator function taking a :class:`PartyContext`.
Sending is immediate (``ctx.send``); receiving suspends the party until the
message is available::

    def alice(ctx):
        ctx.send(2, "greeting", 42)
        reply = yield ctx.recv(2, "reply")
        return reply

Channels are reliable FIFO queues per ordered pair of parties. The scheduler
runs parties round-robin in index order until each blocks, so a session is a
pure function of its programs and seed.
"""
from __future__ import annotations

import hashlib
import inspect
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from pplp import wire


class ProtocolError(RuntimeError):
    pass


class DeadlockError(ProtocolError):
    def __init__(self, blocked: Mapping[int, Recv]):
        self.blocked = dict(blocked)
        desc = ", ".join(f"P{p} waits for {r.kind!r} from P{r.sender}" for p, r in sorted(blocked.items()))
        super().__init__(f"deadlock: {desc}")


@dataclass(frozen=True)
class Message:
    round: int
    sender: int
    receiver: int
    kind: str
    payload: bytes

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.payload).hexdigest()

    def decoded(self) -> Any:
        return wire.decode(self.payload)


@dataclass(frozen=True)
class Recv:
    sender: int
    kind: str


@dataclass(frozen=True)
class ViewEntry:
    """Something a party holds, computes or decrypts, tagged by protocol step."""

    party: int
    category: str
    tag: str
    payload: bytes

    @property
    def value(self) -> Any:
        return wire.decode(self.payload)


@dataclass
class Transcript:
    parties: tuple[int, ...]
    messages: list[Message] = field(default_factory=list)
    delivered: list[Message] = field(default_factory=list)
    views: list[ViewEntry] = field(default_factory=list)

    def sent_by(self, party: int) -> list[Message]:
        return [m for m in self.messages if m.sender == party]

    def received_by(self, party: int) -> list[Message]:
        return [m for m in self.delivered if m.receiver == party]

    def received_kinds(self, party: int, exclude_prefix: str | None = None) -> Counter:
        return Counter(m.kind for m in self.received_by(party)
                       if exclude_prefix is None or not m.kind.startswith(exclude_prefix))

    def entries(self, party: int | None = None, category: str | None = None,
                tag: str | None = None) -> list[ViewEntry]:
        return [e for e in self.views
                if (party is None or e.party == party)
                and (category is None or e.category == category)
                and (tag is None or e.tag == tag)]

    def value(self, party: int, category: str, tag: str) -> Any:
        found = self.entries(party, category, tag)
        if not found:
            raise KeyError(f"P{party} has no {category} entry {tag!r}")
        return found[-1].value

    def export(self) -> str:
        return "".join(f"{m.round}|{m.sender}|{m.receiver}|{m.kind}|{m.digest}\n" for m in self.messages)

    def digest(self) -> str:
        h = hashlib.sha256(self.export().encode())
        for e in self.views:
            h.update(f"{e.party}|{e.category}|{e.tag}|".encode())
            h.update(hashlib.sha256(e.payload).digest())
        return h.hexdigest()

    def check(self) -> None:
        """Assert no loss, no duplication and per-pair ordering."""
        if Counter(self.messages) != Counter(self.delivered):
            raise ProtocolError("sent and delivered messages differ")
        if len(set(m.round for m in self.messages)) != len(self.messages):
            raise ProtocolError("duplicate round numbers")
        last: dict[tuple[int, int], int] = {}
        for m in self.delivered:
            pair = (m.sender, m.receiver)
            if m.round <= last.get(pair, -1):
                raise ProtocolError(f"out-of-order delivery on P{pair[0]}->P{pair[1]}")
            last[pair] = m.round


class PartyContext:
    def __init__(self, party: int, parties: tuple[int, ...], seed, session: _Session):
        self.party = party
        self.parties = parties
        self.rng = random.Random(f"{seed}/party/{party}")
        self._session = session

    @property
    def others(self) -> list[int]:
        return [p for p in self.parties if p != self.party]

    def send(self, to: int, kind: str, obj: Any) -> None:
        if to == self.party or to not in self.parties:
            raise ProtocolError(f"P{self.party} cannot send to P{to}")
        self._session.post(self.party, to, kind, wire.encode(obj))

    def recv(self, sender: int, kind: str) -> Recv:
        return Recv(sender, kind)

    def _log(self, category: str, tag: str, value: Any) -> None:
        self._session.transcript.views.append(ViewEntry(self.party, category, tag, wire.encode(value)))

    def hold(self, tag: str, value: Any) -> None:
        self._log("hold", tag, value)

    def compute(self, tag: str, value: Any) -> None:
        self._log("compute", tag, value)

    def decrypted(self, tag: str, value: Any) -> None:
        self._log("decrypt", tag, value)


class _Session:
    def __init__(self, parties: tuple[int, ...]):
        self.transcript = Transcript(parties)
        self.queues: dict[tuple[int, int], deque[Message]] = {}
        self.round = 0

    def post(self, sender: int, receiver: int, kind: str, payload: bytes) -> None:
        msg = Message(self.round, sender, receiver, kind, payload)
        self.round += 1
        self.transcript.messages.append(msg)
        self.queues.setdefault((sender, receiver), deque()).append(msg)


_START = object()


def run_session(programs: Mapping[int, Callable[[PartyContext], Any]], seed=0) -> tuple[dict[int, Any], Transcript]:
    """Run one program per party to completion.

    Returns each party's return value and the full transcript. Raises
    DeadlockError when every unfinished party waits on a message nobody sent.
    """
    parties = tuple(sorted(programs))
    session = _Session(parties)
    outputs: dict[int, Any] = {}
    running = {}
    waiting: dict[int, Any] = {}
    for p in parties:
        result = programs[p](PartyContext(p, parties, seed, session))
        if inspect.isgenerator(result):
            running[p] = result
            waiting[p] = _START
        else:
            outputs[p] = result

    while running:
        progressed = False
        for p in parties:
            while p in running:
                want = waiting[p]
                if want is _START:
                    value = None
                else:
                    queue = session.queues.get((want.sender, p))
                    if not queue:
                        break
                    msg = queue.popleft()
                    if msg.kind != want.kind:
                        raise ProtocolError(f"P{p} expected {want.kind!r} from P{want.sender}, got {msg.kind!r}")
                    session.transcript.delivered.append(msg)
                    value = wire.decode(msg.payload)
                try:
                    nxt = running[p].send(value)
                except StopIteration as stop:
                    outputs[p] = stop.value
                    del running[p]
                    progressed = True
                    break
                if not isinstance(nxt, Recv):
                    raise ProtocolError(f"P{p} yielded {nxt!r}; party programs may only yield ctx.recv(...)")
                waiting[p] = nxt
                progressed = True
        if running and not progressed:
            raise DeadlockError({p: waiting[p] for p in running})

    leftover = [m for q in session.queues.values() for m in q]
    if leftover:
        m = leftover[0]
        raise ProtocolError(f"{len(leftover)} undelivered message(s), first {m.kind!r} P{m.sender}->P{m.receiver}")
    session.transcript.check()
    return outputs, session.transcript


@dataclass
class AssertionReport:
    party: int
    violations: list[tuple[str, str, Any]]

    @property
    def ok(self) -> bool:
        return not self.violations


def transcript_assert(t: Transcript, party: int, forbidden: Callable[[Any], bool],
                      kinds: Iterable[str] | None = None,
                      decrypt_tags: Iterable[str] | None = None) -> AssertionReport:
    """Scan everything ``party`` received or decrypted for forbidden plaintext values.

    Only values readable without a private key are examined; ciphertexts are
    opaque. ``kinds`` and ``decrypt_tags`` restrict the scan when given.
    """
    kinds = None if kinds is None else set(kinds)
    decrypt_tags = None if decrypt_tags is None else set(decrypt_tags)
    hits = []
    for m in t.received_by(party):
        if kinds is not None and m.kind not in kinds:
            continue
        for v in wire.plaintext_values(m.decoded()):
            if forbidden(v):
                hits.append(("received", m.kind, v))
    for e in t.entries(party, "decrypt"):
        if decrypt_tags is not None and e.tag not in decrypt_tags:
            continue
        for v in wire.plaintext_values(e.value):
            if forbidden(v):
                hits.append(("decrypted", e.tag, v))
    return AssertionReport(party, hits)
