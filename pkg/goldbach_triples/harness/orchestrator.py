"""Session orchestrator - runs one GTP session end to end over in-memory links."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

from pydantic import BaseModel, Field, field_validator, model_validator

from goldbach_triples.comms.audit_log import AuditLog
from goldbach_triples.comms.channel import InMemoryLink, TamperSpec, chain_tampers, tamper_hook
from goldbach_triples.comms.codec import decode_message, encode_message
from goldbach_triples.core.primes import PrimeTable
from goldbach_triples.errors import HarnessInvariantError
from goldbach_triples.protocol.gtp import (
    AuditRecord,
    Clock,
    GtpMessage,
    SessionSetup,
    Step,
    ca_create_session,
    ca_step1,
    ca_step2,
    utc_now,
)
from goldbach_triples.protocol.parties import Eavesdropper, Party, PartyStatus
from goldbach_triples.protocol.registry import KeyRegistry
from goldbach_triples.protocol.words import BitWord, xor_mask

logger = logging.getLogger(__name__)

LINKS = ("a", "b")
DIRECTIONS = {"a": "CA->A", "b": "CA->B"}


class FrozenClock:
    """Clock that always reports the same instant."""

    def __init__(self, instant: datetime):
        self.instant = instant

    def __call__(self) -> datetime:
        return self.instant


class SessionConfig(BaseModel):
    """Everything that determines one harness run."""

    n: int | None = None
    n_range: tuple[int, int] | None = None
    seed: int = 0
    width: int | None = Field(default=None, ge=1)
    nonce_required: bool = False
    tap: frozenset[str] = Field(default_factory=frozenset)
    triple: tuple[int, int, int] | None = None
    roles: tuple[int, int, int] | None = None
    tamper: list[TamperSpec] = Field(default_factory=list)
    unmask_early: bool = False
    initiator: str = "alice"
    responder: str = "bob"

    @field_validator("tap", mode="before")
    @classmethod
    def _parse_tap(cls, value: Any) -> frozenset[str]:
        if isinstance(value, str):
            value = {"a", "b"} if value == "both" else {value}
        links = frozenset(str(v).lower() for v in value)
        unknown = links - set(LINKS)
        if unknown:
            raise ValueError(f"unknown links: {sorted(unknown)}")
        return links

    @field_validator("tamper", mode="before")
    @classmethod
    def _parse_tamper(cls, value: Any) -> list[TamperSpec]:
        return [TamperSpec.parse(v) if isinstance(v, str) else v for v in value]

    @model_validator(mode="after")
    def _one_n_source(self) -> SessionConfig:
        if (self.n is None) == (self.n_range is None):
            raise ValueError("exactly one of n or n_range is required")
        return self


@dataclass(frozen=True)
class TranscriptEntry:
    """One frame as delivered."""

    direction: str
    message: GtpMessage
    frame: bytes


@dataclass(frozen=True)
class Outcome:
    keys_match: bool
    derived_key_a: BitWord | None
    derived_key_b: BitWord | None


@dataclass
class Transcript:
    """Ordered record of a session's traffic and its result."""

    session_id: int
    entries: list[TranscriptEntry] = field(default_factory=list)
    outcome: Outcome | None = None

    @property
    def frames(self) -> list[bytes]:
        return [entry.frame for entry in self.entries]

    def payload(self, step: Step) -> BitWord:
        for entry in self.entries:
            if entry.message.step == step:
                return entry.message.payload
        raise KeyError(step)

    @property
    def complete(self) -> bool:
        return [e.message.step for e in self.entries] == [Step.S1A, Step.S1B, Step.S2A, Step.S2B]


@dataclass(frozen=True)
class EveView:
    """What the eavesdropper saw and what she can compute from it."""

    links: frozenset[str]
    captured: tuple[tuple[str, GtpMessage], ...]
    combination: BitWord | None

    def step1_view(self) -> dict[Step, BitWord]:
        return {m.step: m.payload for _, m in self.captured if m.step.phase == 1}


@dataclass(frozen=True)
class PlaintextFinding:
    """A frame whose payload equals the session key's bit pattern."""

    step: Step
    leak: bool


@dataclass
class SessionResult:
    setup: SessionSetup
    transcript: Transcript
    audit: AuditRecord
    eve: EveView


def _covers(setup: SessionSetup, registry: KeyRegistry) -> dict[Step, tuple[BitWord, BitWord]]:
    """Step -> (cover, covered word) for an honest session."""
    h_a = registry.get(setup.initiator).key_hash(setup.width)
    h_b = registry.get(setup.responder).key_hash(setup.width)
    return {
        Step.S1A: (h_a, setup.p1),
        Step.S1B: (h_b, setup.p2),
        Step.S2A: (setup.p1, setup.p3),
        Step.S2B: (setup.p2, setup.p3),
    }


def scan_for_plaintext_key(
    transcript: Transcript, setup: SessionSetup, registry: KeyRegistry
) -> list[PlaintextFinding]:
    """Find frames carrying the P3 bit pattern.

    A match is a leak only when the frame really is P3 under a zero cover;
    anything else is a coincidence of payload bits.
    """
    covers = _covers(setup, registry)
    findings: list[PlaintextFinding] = []
    for entry in transcript.entries:
        if entry.message.payload != setup.p3:
            continue
        cover, covered = covers[entry.message.step]
        leak = cover.value == 0 and covered == setup.p3
        findings.append(PlaintextFinding(entry.message.step, leak))
        if not leak:
            logger.info("Payload of %s matches P3 by coincidence", entry.message.step.value)
    return findings


class SessionOrchestrator:
    """Runs GTP sessions between registered parties, deterministically per seed."""

    def __init__(
        self,
        registry: KeyRegistry,
        table: PrimeTable,
        clock: Clock = utc_now,
        on_event: Callable[[dict[str, Any]], None] | None = None,
        audit_log: AuditLog | None = None,
    ):
        self.registry = registry
        self.table = table
        self.clock = clock
        self.audit_log = audit_log
        self._on_event = on_event

    def _emit_event(self, event_type: str, **data: Any) -> None:
        """Emit an event to listeners."""
        if self._on_event:
            self._on_event({
                "type": event_type,
                "timestamp": self.clock().isoformat(),
                **data,
            })

    def _status_callback(self, party_id: str) -> Callable[[PartyStatus], None]:
        def callback(status: PartyStatus) -> None:
            self._emit_event("party_status", partyId=party_id, status=status.value)
        return callback

    def run(self, config: SessionConfig) -> SessionResult:
        """Run one session and check the protocol identities on honest runs."""
        rng = random.Random(config.seed)
        setup, record = ca_create_session(
            self.registry,
            self.table,
            rng,
            initiator=config.initiator,
            responder=config.responder,
            n=config.n,
            n_range=config.n_range,
            width=config.width,
            triple=config.triple,
            roles=config.roles,
            nonce_required=config.nonce_required,
            clock=self.clock,
        )
        self._emit_event("session_created", sessionId=f"{setup.session_id:016x}", n=setup.n)

        parties = {
            "a": self._make_party(setup, setup.initiator, "a", config),
            "b": self._make_party(setup, setup.responder, "b", config),
        }
        eve = Eavesdropper(links=config.tap)
        transcript = Transcript(session_id=setup.session_id)

        links: dict[str, InMemoryLink] = {}
        for name in LINKS:
            hooks = [tamper_hook(spec) for spec in config.tamper if spec.step.link == name]
            link = InMemoryLink(
                name,
                receiver=lambda frame, party=parties[name]: party.receive(decode_message(frame)),
                tamper=chain_tampers(hooks),
            )
            link.add_tap(lambda link_name, frame: eve.observe(link_name, decode_message(frame)))
            links[name] = link

        step1, step2 = ca_step1(setup, self.registry), ca_step2(setup)
        for message in (*step1, *step2):
            link = links[message.step.link]
            delivered = link.send(encode_message(message))
            transcript.entries.append(
                TranscriptEntry(DIRECTIONS[link.name], decode_message(delivered), delivered)
            )
            self._emit_event("message_sent", step=message.step.value, link=link.name)

        key_a, key_b = parties["a"].key, parties["b"].key
        transcript.outcome = Outcome(
            keys_match=key_a is not None and key_a == key_b == setup.p3,
            derived_key_a=key_a,
            derived_key_b=key_b,
        )
        view = EveView(
            links=config.tap,
            captured=tuple((m.step.link, m) for m in eve.captured),
            combination=eve.combination(),
        )

        if not config.tamper:
            self._check_honest_run(setup, transcript, view)

        if self.audit_log is not None:
            self.audit_log.append(record)
        self._emit_event(
            "session_completed",
            sessionId=f"{setup.session_id:016x}",
            keysMatch=transcript.outcome.keys_match,
        )
        return SessionResult(setup=setup, transcript=transcript, audit=record, eve=view)

    def _make_party(self, setup: SessionSetup, party_id: str, link: str, config: SessionConfig) -> Party:
        return Party(
            party_id,
            link,
            self.registry.get(party_id).key_hash(setup.width),
            session_id=setup.session_id,
            nonce_required=config.nonce_required,
            unmask_early=config.unmask_early,
            on_status_change=self._status_callback(party_id),
        )

    def _check_honest_run(self, setup: SessionSetup, transcript: Transcript, view: EveView) -> None:
        assert transcript.outcome is not None
        if not transcript.complete:
            raise HarnessInvariantError("honest session did not deliver exactly 1a, 1b, 2a, 2b")
        if not transcript.outcome.keys_match:
            raise HarnessInvariantError(
                f"honest session {setup.session_id:016x} derived different keys"
            )
        if view.combination is not None and view.combination != xor_mask(setup.p1, setup.p2):
            raise HarnessInvariantError("step-2 combination is not P1 ^ P2")
        leaks = [f for f in scan_for_plaintext_key(transcript, setup, self.registry) if f.leak]
        if leaks:
            raise HarnessInvariantError(f"P3 sent in plaintext on {leaks[0].step.value}")


def run_session(
    config: SessionConfig,
    registry: KeyRegistry,
    table: PrimeTable,
    clock: Clock = utc_now,
    audit_log: AuditLog | None = None,
) -> tuple[Transcript, AuditRecord, EveView]:
    """Convenience wrapper around :class:`SessionOrchestrator`."""
    result = SessionOrchestrator(registry, table, clock=clock, audit_log=audit_log).run(config)
    return result.transcript, result.audit, result.eve
