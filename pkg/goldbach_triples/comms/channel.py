"""Synchronous in-memory links between the CA and each party."""

from __future__ import annotations

import logging
import re
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Literal, Protocol

from goldbach_triples.comms.codec import NONCE_LEN, decode_message, encode_message
from goldbach_triples.errors import PreconditionError
from goldbach_triples.protocol.gtp import Step

logger = logging.getLogger(__name__)

FrameHandler = Callable[[bytes], None]
FrameTap = Callable[[str, bytes], None]
FrameTamper = Callable[[bytes], bytes]


class Transport(Protocol):
    """What the orchestrator needs from a link; a socket transport would fit too."""

    name: str

    def send(self, frame: bytes) -> bytes: ...


class InMemoryLink:
    """One CA -> party link with optional tamper hook and passive taps.

    Frames pass through the tamper hook first; taps and the receiver both see
    the frame as delivered.
    """

    def __init__(self, name: str, receiver: FrameHandler, tamper: FrameTamper | None = None):
        self.name = name
        self._receiver = receiver
        self._tamper = tamper
        self._taps: list[FrameTap] = []
        self.frames: list[bytes] = []

    def add_tap(self, tap: FrameTap) -> None:
        self._taps.append(tap)

    def send(self, frame: bytes) -> bytes:
        """Deliver a frame; returns the bytes actually delivered."""
        delivered = self._tamper(frame) if self._tamper else frame
        if delivered != frame:
            logger.warning("Frame altered in transit on link %s", self.name)
        self.frames.append(delivered)
        for tap in self._taps:
            tap(self.name, delivered)
        self._receiver(delivered)
        return delivered


@dataclass(frozen=True)
class TamperSpec:
    """Flip bit ``bit`` of the payload (or the nonce) of the ``step`` message in transit."""

    step: Step
    bit: int
    target: Literal["payload", "nonce"] = "payload"

    def __post_init__(self) -> None:
        if self.bit < 0 or (self.target == "nonce" and self.bit >= 8 * NONCE_LEN):
            raise PreconditionError("bad_tamper", f"bit {self.bit} cannot be flipped in the {self.target}")

    @classmethod
    def parse(cls, text: str) -> TamperSpec:
        """Parse ``"2a:bit3"`` (or ``"2a:3"``) for the payload, ``"2a:nonce"`` or ``"2a:nonce5"`` for the nonce."""
        match = re.fullmatch(
            r"\s*(1a|1b|2a|2b)\s*:\s*(?:(nonce)(\d*)|(?:bit)?(\d+))\s*", text, re.IGNORECASE
        )
        if not match:
            raise PreconditionError(
                "bad_tamper", f"expected STEP:bitN or STEP:nonce such as 2a:bit3, got {text!r}"
            )
        step = Step(match.group(1).lower())
        if match.group(2):
            return cls(step=step, bit=int(match.group(3) or 0), target="nonce")
        return cls(step=step, bit=int(match.group(4)))

    def __str__(self) -> str:
        kind = "bit" if self.target == "payload" else "nonce"
        return f"{self.step.value}:{kind}{self.bit}"


def flip_payload_bit(spec: TamperSpec) -> FrameTamper:
    """Tamper hook that flips one payload bit of the matching step."""

    def tamper(frame: bytes) -> bytes:
        message = decode_message(frame)
        if message.step != spec.step:
            return frame
        return encode_message(replace(message, payload=message.payload.flip(spec.bit)))

    return tamper


def flip_nonce_bit(spec: TamperSpec) -> FrameTamper:
    """Tamper hook that flips one nonce bit of the matching step; frames without a nonce pass."""

    def tamper(frame: bytes) -> bytes:
        message = decode_message(frame)
        if message.step != spec.step:
            return frame
        if message.nonce is None:
            logger.debug("No nonce on %s to tamper with", spec.step.value)
            return frame
        return encode_message(replace(message, nonce=message.nonce ^ (1 << spec.bit)))

    return tamper


def tamper_hook(spec: TamperSpec) -> FrameTamper:
    return flip_nonce_bit(spec) if spec.target == "nonce" else flip_payload_bit(spec)


def chain_tampers(tampers: list[FrameTamper]) -> FrameTamper | None:
    if not tampers:
        return None

    def tamper(frame: bytes) -> bytes:
        for hook in tampers:
            frame = hook(frame)
        return frame

    return tamper
