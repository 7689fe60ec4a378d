"""Binary wire frames for GTP messages.

Layout (all integers big-endian)::

    0x47 'G' | 0x01 version | session_id u64 | step u8 | width u16 |
    payload ceil(width / 8) bytes | [0x4E 'N' | 0x08 | nonce u64]
"""

from __future__ import annotations

import struct

from goldbach_triples.errors import (
    BadLengthError,
    BadMagicError,
    BadVersionError,
    PayloadWidthError,
    ShortFrameError,
    UnknownStepError,
)
from goldbach_triples.protocol.gtp import GtpMessage, Step
from goldbach_triples.protocol.words import BitWord

MAGIC = 0x47
VERSION = 0x01
NONCE_TAG = 0x4E
NONCE_LEN = 8

_HEADER = struct.Struct(">BBQBH")
PAYLOAD_OFFSET = _HEADER.size


def payload_length(width: int) -> int:
    return (width + 7) // 8


def encode_message(message: GtpMessage) -> bytes:
    """Serialise a message into one frame."""
    payload = message.payload
    frame = _HEADER.pack(MAGIC, VERSION, message.session_id, message.step.code, payload.width)
    frame += payload.to_bytes()
    if message.nonce is not None:
        frame += bytes([NONCE_TAG, NONCE_LEN]) + message.nonce.to_bytes(NONCE_LEN, "big")
    return frame


def decode_message(frame: bytes) -> GtpMessage:
    """Parse one frame; each malformation raises its own FrameError subclass."""
    if len(frame) < 1:
        raise ShortFrameError("short frame: empty")
    if frame[0] != MAGIC:
        raise BadMagicError(f"bad magic 0x{frame[0]:02X}")
    if len(frame) >= 2 and frame[1] != VERSION:
        raise BadVersionError(f"unsupported version 0x{frame[1]:02X}")
    if len(frame) < _HEADER.size:
        raise ShortFrameError(f"short frame: {len(frame)} bytes, header needs {_HEADER.size}")

    _, _, session_id, step_code, width = _HEADER.unpack_from(frame)
    try:
        step = Step.from_code(step_code)
    except ValueError as e:
        raise UnknownStepError(str(e)) from None
    if width < 1:
        raise PayloadWidthError("payload width must be at least 1 bit")

    end = PAYLOAD_OFFSET + payload_length(width)
    if len(frame) < end:
        raise ShortFrameError(f"short frame: payload needs {end} bytes, got {len(frame)}")
    value = int.from_bytes(frame[PAYLOAD_OFFSET:end], "big")
    if value >= 1 << width:
        raise PayloadWidthError(f"payload 0x{value:X} overflows {width} bits")

    nonce = _decode_nonce(frame[end:])
    return GtpMessage(
        session_id=session_id,
        step=step,
        payload=BitWord(value, width),
        nonce=nonce,
    )


def _decode_nonce(tail: bytes) -> int | None:
    if not tail:
        return None
    if len(tail) < 2 or tail[0] != NONCE_TAG:
        raise BadLengthError(f"{len(tail)} trailing bytes after payload")
    if tail[1] != NONCE_LEN or len(tail) != 2 + NONCE_LEN:
        raise BadLengthError(
            f"nonce field declares {tail[1]} bytes, frame carries {len(tail) - 2}"
        )
    return int.from_bytes(tail[2:], "big")
