"""Exception hierarchy shared by the library, the harness and the CLI."""

from __future__ import annotations


class GoldbachError(Exception):
    """Root of all errors raised by goldbach_triples."""


class PreconditionError(GoldbachError, ValueError):
    """An input violates an operation's contract.

    ``reason`` is a short machine-readable code such as ``n_even`` or
    ``table_too_small`` so callers can tell the failures apart.
    """

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


class WidthMismatchError(GoldbachError, ValueError):
    """Two bit words of different widths were combined."""


class RegistryError(GoldbachError, KeyError):
    """Unknown or duplicate party in the CA key registry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class SessionError(GoldbachError):
    """The CA could not set up a session."""


class NonceMismatchError(GoldbachError):
    """A message carried a missing or unexpected nonce."""


class HarnessInvariantError(GoldbachError, AssertionError):
    """An honest session broke one of the protocol identities."""


class FrameError(GoldbachError, ValueError):
    """Base class for wire frame decoding failures."""


class ShortFrameError(FrameError):
    """Frame ends before its header or payload is complete."""


class BadMagicError(FrameError):
    """Frame does not start with the protocol magic byte."""


class BadVersionError(FrameError):
    """Frame carries an unsupported version byte."""


class BadLengthError(FrameError):
    """Frame length disagrees with its declared contents."""


class UnknownStepError(FrameError):
    """Frame step code is not one of 1a, 1b, 2a, 2b."""


class PayloadWidthError(FrameError):
    """Payload value does not fit in the declared width."""
