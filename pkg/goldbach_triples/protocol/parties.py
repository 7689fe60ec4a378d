"""Party-side state machines for GTP, and the passive eavesdropper."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

from goldbach_triples.errors import GoldbachError, NonceMismatchError, SessionError
from goldbach_triples.protocol.gtp import GtpMessage, Step, eavesdropper_combine, party_derive_key
from goldbach_triples.protocol.words import BitWord, xor_mask

logger = logging.getLogger(__name__)


class PartyStatus(str, Enum):
    """Where a party is in the key exchange."""

    WAITING = "waiting"
    HAVE_STEP1 = "have_step1"
    HAVE_STEP2 = "have_step2"
    KEYED = "keyed"
    FAILED = "failed"


class Party:
    """Alice or Bob: collects its two CA messages and recovers P3.

    Messages may arrive in either order. With ``unmask_early`` the party strips
    its key hash from the step-1 message as soon as it arrives and keeps the
    bare prime; otherwise it holds the masked word and unmasks at the end.
    Both orders give the same key.
    """

    def __init__(
        self,
        party_id: str,
        link: str,
        key_hash: BitWord,
        session_id: int,
        nonce_required: bool = False,
        unmask_early: bool = False,
        on_status_change: Callable[[PartyStatus], None] | None = None,
    ):
        self.id = party_id
        self.link = link
        self.session_id = session_id
        self.nonce_required = nonce_required
        self.unmask_early = unmask_early
        self.status = PartyStatus.WAITING
        self.key: BitWord | None = None
        self.error: str | None = None

        self._key_hash = key_hash
        self._step1: BitWord | None = None
        self._step2: BitWord | None = None
        self._prime: BitWord | None = None
        self._nonce: int | None = None
        self._on_status_change = on_status_change

    def _set_status(self, status: PartyStatus) -> None:
        self.status = status
        if self._on_status_change:
            self._on_status_change(status)

    def _fail(self, error: GoldbachError) -> None:
        self.error = str(error)
        self._set_status(PartyStatus.FAILED)
        raise error

    def _check_nonce(self, message: GtpMessage) -> None:
        if not self.nonce_required:
            return
        if message.nonce is None:
            self._fail(NonceMismatchError(f"{self.id}: message {message.step.value} has no nonce"))
        if self._nonce is None:
            self._nonce = message.nonce
        elif message.nonce != self._nonce:
            self._fail(
                NonceMismatchError(
                    f"{self.id}: nonce {message.nonce:#x} on {message.step.value} "
                    f"does not echo {self._nonce:#x}"
                )
            )

    def receive(self, message: GtpMessage) -> None:
        """Accept one message; derives the key once both steps are in."""
        if self.status in (PartyStatus.KEYED, PartyStatus.FAILED):
            self._fail(SessionError(f"{self.id}: unexpected {message.step.value} after {self.status.value}"))
        if message.session_id != self.session_id:
            self._fail(SessionError(f"{self.id}: message for foreign session {message.session_id:#x}"))
        if message.step.link != self.link:
            self._fail(SessionError(f"{self.id}: message {message.step.value} is not for link {self.link}"))
        self._check_nonce(message)

        if message.step.phase == 1:
            if self._step1 is not None:
                self._fail(SessionError(f"{self.id}: duplicate step 1"))
            self._step1 = message.payload
            if self.unmask_early:
                self._prime = xor_mask(message.payload, self._key_hash)
        else:
            if self._step2 is not None:
                self._fail(SessionError(f"{self.id}: duplicate step 2"))
            self._step2 = message.payload

        if self._step1 is not None and self._step2 is not None:
            self._finish()
        elif self._step1 is not None:
            self._set_status(PartyStatus.HAVE_STEP1)
        else:
            self._set_status(PartyStatus.HAVE_STEP2)

    def _finish(self) -> None:
        assert self._step1 is not None and self._step2 is not None
        if self._prime is not None:
            self.key = xor_mask(self._prime, self._step2)
        else:
            self.key = party_derive_key(self._step1, self._step2, self._key_hash)
        logger.debug("%s derived key %s", self.id, self.key.bits)
        self._set_status(PartyStatus.KEYED)


@dataclass
class Eavesdropper:
    """Passive tap on one or both CA links."""

    links: frozenset[str]
    captured: list[GtpMessage] = field(default_factory=list)

    def observe(self, link: str, message: GtpMessage) -> None:
        if link in self.links:
            self.captured.append(message)

    def payload(self, step: Step) -> BitWord | None:
        for message in self.captured:
            if message.step == step:
                return message.payload
        return None

    def combination(self) -> BitWord | None:
        """m2a ^ m2b when both step-2 messages were captured."""
        m2a, m2b = self.payload(Step.S2A), self.payload(Step.S2B)
        if m2a is None or m2b is None:
            return None
        return eavesdropper_combine(m2a, m2b)
