"""Fixed-width binary words and the XOR cover operation."""

from __future__ import annotations

from dataclasses import dataclass

from goldbach_triples.errors import PreconditionError, WidthMismatchError


@dataclass(frozen=True)
class BitWord:
    """A natural number carried in exactly ``width`` bits."""

    value: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise PreconditionError("bad_width", f"width must be >= 1, got {self.width}")
        if self.value < 0 or self.value >= 1 << self.width:
            raise PreconditionError(
                "width_overflow", f"{self.value} does not fit in {self.width} bits"
            )

    @classmethod
    def from_bits(cls, bits: str) -> BitWord:
        """Parse a string such as ``"0101111"``; its length is the width."""
        return cls(int(bits, 2), len(bits))

    @property
    def bits(self) -> str:
        return format(self.value, f"0{self.width}b")

    def to_bytes(self) -> bytes:
        """Big-endian, high bits zero padded to whole bytes."""
        return self.value.to_bytes((self.width + 7) // 8, "big")

    def flip(self, bit: int) -> BitWord:
        """Copy with bit ``bit`` (0 = least significant) inverted."""
        if not 0 <= bit < self.width:
            raise PreconditionError("out_of_range", f"bit {bit} outside width {self.width}")
        return BitWord(self.value ^ (1 << bit), self.width)

    def __xor__(self, other: BitWord) -> BitWord:
        return xor_mask(self, other)

    def __str__(self) -> str:
        return self.bits


def xor_mask(a: BitWord, b: BitWord) -> BitWord:
    """Bitwise exclusive-or of two words of equal width."""
    if a.width != b.width:
        raise WidthMismatchError(f"cannot combine {a.width}-bit and {b.width}-bit words")
    return BitWord(a.value ^ b.value, a.width)


def truncate_hash(full_hash: bytes, width: int) -> BitWord:
    """Keep the low ``width`` bits of a digest read as a big-endian integer."""
    available = len(full_hash) * 8
    if width > available:
        raise PreconditionError(
            "hash_too_short", f"{available}-bit hash cannot cover a {width}-bit word"
        )
    value = int.from_bytes(full_hash, "big") & ((1 << width) - 1)
    return BitWord(value, width)
