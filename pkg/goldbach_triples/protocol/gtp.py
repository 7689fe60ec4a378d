"""Goldbach Triples Protocol: pure CA and party operations.

The CA picks an odd N, splits it as N = P1 + P2 + P3 and distributes P3 as
the session key:

    step 1   CA -> initiator  P1 ^ h(Ka)      CA -> responder  P2 ^ h(Kb)
    step 2   CA -> initiator  P1 ^ P3         CA -> responder  P2 ^ P3
    step 3   each party XORs its two messages with its own h(K) and gets P3

Nothing here performs I/O; transport and persistence live in ``comms`` and
``harness``. Reusing h(K) as a pad across sessions is not secure against
known-key analysis; this module implements the protocol as described and
makes no stronger claim.
"""

from __future__ import annotations

import hashlib
import logging
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from goldbach_triples.core.partitions import MIN_ODD, GoldbachTriple, count_triples, nth_triple
from goldbach_triples.core.primes import PrimeTable
from goldbach_triples.errors import PreconditionError, SessionError
from goldbach_triples.protocol.registry import KeyRegistry
from goldbach_triples.protocol.words import BitWord, xor_mask

logger = logging.getLogger(__name__)

Clock = Callable[[], datetime]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class Step(str, Enum):
    """The four CA messages of a session."""

    S1A = "1a"
    S1B = "1b"
    S2A = "2a"
    S2B = "2b"

    @property
    def code(self) -> int:
        return int(self.value, 16)

    @classmethod
    def from_code(cls, code: int) -> Step:
        for step in cls:
            if step.code == code:
                return step
        raise ValueError(f"unknown step code 0x{code:02X}")

    @property
    def link(self) -> str:
        """``a`` for the initiator link, ``b`` for the responder link."""
        return self.value[1]

    @property
    def phase(self) -> int:
        return int(self.value[0])


class Role(str, Enum):
    """Which share plays which part in the session."""

    INITIATOR = "initiator"
    RESPONDER = "responder"
    SESSION_KEY = "session_key"


@dataclass(frozen=True)
class SessionSetup:
    """CA-side session state: N, its three shares and the two parties."""

    session_id: int
    n: int
    shares: tuple[BitWord, BitWord, BitWord]
    initiator: str
    responder: str
    nonce: int | None = None

    def __post_init__(self) -> None:
        widths = {share.width for share in self.shares}
        if len(widths) != 1:
            raise PreconditionError("width_mismatch", f"shares have widths {sorted(widths)}")
        if self.n % 2 == 0:
            raise PreconditionError("n_even", f"n must be odd, got {self.n}")
        total = sum(share.value for share in self.shares)
        if total != self.n:
            raise PreconditionError("sum_mismatch", f"shares sum to {total}, not {self.n}")

    @property
    def width(self) -> int:
        return self.shares[0].width

    @property
    def p1(self) -> BitWord:
        return self.shares[0]

    @property
    def p2(self) -> BitWord:
        return self.shares[1]

    @property
    def p3(self) -> BitWord:
        return self.shares[2]

    @property
    def roles(self) -> dict[Role, BitWord]:
        return {
            Role.INITIATOR: self.p1,
            Role.RESPONDER: self.p2,
            Role.SESSION_KEY: self.p3,
        }

    def party_for(self, step: Step) -> str:
        return self.initiator if step.link == "a" else self.responder


@dataclass(frozen=True)
class GtpMessage:
    """One CA -> party message."""

    session_id: int
    step: Step
    payload: BitWord
    nonce: int | None = None


@dataclass(frozen=True)
class AuditRecord:
    """The (N, P1, P2, P3) tuple tying a session key to its partition."""

    session_id: int
    n: int
    p1: int
    p2: int
    p3: int
    width: int
    timestamp: datetime
    parties: tuple[str, str]

    @classmethod
    def from_setup(cls, setup: SessionSetup, timestamp: datetime) -> AuditRecord:
        return cls(
            session_id=setup.session_id,
            n=setup.n,
            p1=setup.p1.value,
            p2=setup.p2.value,
            p3=setup.p3.value,
            width=setup.width,
            timestamp=timestamp,
            parties=(setup.initiator, setup.responder),
        )


@dataclass(frozen=True)
class AuditVerdict:
    """Outcome of :func:`verify_audit`; truthy when the record is sound."""

    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _resolve_n(n: int | None, n_range: tuple[int, int] | None, rng: random.Random) -> int:
    if n is not None and n_range is not None:
        raise PreconditionError("n_source", "give either an explicit n or a range, not both")
    if n is not None:
        return n
    if n_range is None:
        raise PreconditionError("n_source", "an explicit n or a range is required")
    lo, hi = n_range
    lo = max(lo if lo % 2 else lo + 1, MIN_ODD)
    if hi < lo:
        raise PreconditionError("range_order", f"no odd n >= {MIN_ODD} in {n_range}")
    return lo + 2 * rng.randrange((hi - lo) // 2 + 1)


def _choose_shares(
    n: int,
    table: PrimeTable,
    total: int,
    rng: random.Random,
    triple: Sequence[int] | None,
    roles: Sequence[int] | None,
) -> tuple[int, int, int]:
    if triple is None:
        triple = roles
    if triple is not None:
        try:
            chosen = GoldbachTriple.from_primes(triple, table, n=n)
        except PreconditionError as e:
            raise SessionError(f"{tuple(triple)} is not a Goldbach triple of {n}: {e}") from e
    else:
        chosen = nth_triple(n, table, rng.randrange(total))

    if roles is not None:
        if sorted(roles) != list(chosen.as_tuple()):
            raise SessionError(f"roles {tuple(roles)} are not a permutation of {chosen}")
        p1, p2, p3 = roles
    else:
        p1, p2, p3 = rng.sample(chosen.as_tuple(), 3)
    return p1, p2, p3


def ca_create_session(
    registry: KeyRegistry,
    table: PrimeTable,
    rng: random.Random,
    *,
    initiator: str = "alice",
    responder: str = "bob",
    n: int | None = None,
    n_range: tuple[int, int] | None = None,
    width: int | None = None,
    triple: Sequence[int] | None = None,
    roles: Sequence[int] | None = None,
    nonce_required: bool = False,
    clock: Clock = utc_now,
) -> tuple[SessionSetup, AuditRecord]:
    """Pick N, split it into a random Goldbach triple and assign roles.

    ``triple`` and ``roles`` pin the choice (roles given in P1, P2, P3
    order); otherwise the triple is drawn uniformly from all triples of N
    and the roles from a uniform permutation.
    """
    registry.require(initiator, responder)
    if initiator == responder:
        raise SessionError("initiator and responder must differ")

    resolved = _resolve_n(n, n_range, rng)
    total = count_triples(resolved, table)
    if not total:
        raise SessionError(f"{resolved} has no Goldbach triple")

    session_id = rng.getrandbits(64)
    p1, p2, p3 = _choose_shares(resolved, table, total, rng, triple, roles)
    nonce = rng.getrandbits(64) if nonce_required else None

    required = max(p1, p2, p3).bit_length()
    if width is None:
        width = required
    elif width < required:
        raise SessionError(f"width {width} is below the {required} bits needed for {max(p1, p2, p3)}")

    setup = SessionSetup(
        session_id=session_id,
        n=resolved,
        shares=(BitWord(p1, width), BitWord(p2, width), BitWord(p3, width)),
        initiator=initiator,
        responder=responder,
        nonce=nonce,
    )
    record = AuditRecord.from_setup(setup, clock())
    logger.info(
        "Session %016x: n=%d split among %s/%s at width %d",
        session_id,
        resolved,
        initiator,
        responder,
        width,
    )
    return setup, record


def _message(setup: SessionSetup, step: Step, payload: BitWord) -> GtpMessage:
    return GtpMessage(
        session_id=setup.session_id, step=step, payload=payload, nonce=setup.nonce
    )


def ca_step1(setup: SessionSetup, registry: KeyRegistry) -> tuple[GtpMessage, GtpMessage]:
    """P1 and P2 under cover of the parties' key hashes."""
    h_a = registry.get(setup.initiator).key_hash(setup.width)
    h_b = registry.get(setup.responder).key_hash(setup.width)
    return (
        _message(setup, Step.S1A, xor_mask(setup.p1, h_a)),
        _message(setup, Step.S1B, xor_mask(setup.p2, h_b)),
    )


def ca_step2(setup: SessionSetup) -> tuple[GtpMessage, GtpMessage]:
    """P3 under cover of P1 (initiator) and P2 (responder)."""
    return (
        _message(setup, Step.S2A, xor_mask(setup.p1, setup.p3)),
        _message(setup, Step.S2B, xor_mask(setup.p2, setup.p3)),
    )


def party_derive_key(m_step1: BitWord, m_step2: BitWord, own_key_hash: BitWord) -> BitWord:
    """(P ^ h) ^ (P ^ P3) ^ h = P3."""
    return xor_mask(xor_mask(m_step1, m_step2), own_key_hash)


def eavesdropper_combine(m2a: BitWord, m2b: BitWord) -> BitWord:
    """What an observer of both step-2 links can compute: P1 ^ P2."""
    return xor_mask(m2a, m2b)


def expand_session_key(
    p3: BitWord, session_id: int, length: int = 32, algorithm: str = "sha256"
) -> bytes:
    """Derive session key bytes from the shared seed P3."""
    digest = hashlib.new(algorithm, session_id.to_bytes(8, "big") + p3.to_bytes()).digest()
    if not 1 <= length <= len(digest):
        raise PreconditionError(
            "out_of_range", f"length must be in [1, {len(digest)}] for {algorithm}"
        )
    return digest[:length]


def verify_audit(record: AuditRecord, table: PrimeTable) -> AuditVerdict:
    """Check an audit record: odd N, three primes summing to N, adequate width."""
    reasons: list[str] = []
    shares = (record.p1, record.p2, record.p3)

    if record.n % 2 == 0:
        reasons.append(f"n even: {record.n}")
    total = sum(shares)
    if total != record.n:
        reasons.append(f"sum mismatch: {record.p1}+{record.p2}+{record.p3}={total} != {record.n}")
    for share in shares:
        if share < 0 or share > table.limit:
            reasons.append(f"{share} outside prime table range [0, {table.limit}]")
        elif not table.is_prime(share):
            reasons.append(f"{share} not prime")
    needed = max(max(shares), 0).bit_length()
    if record.width < max(needed, 1):
        reasons.append(f"width {record.width} too small for {max(shares)} ({needed} bits)")
    if len(set(record.parties)) != 2:
        reasons.append(f"parties must be two distinct ids, got {record.parties}")

    return AuditVerdict(ok=not reasons, reasons=reasons)
