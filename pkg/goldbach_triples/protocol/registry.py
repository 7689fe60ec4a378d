"""CA key registry: hashed party keys, truncated to the session width on use."""

from __future__ import annotations

import hashlib
import logging
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass

from goldbach_triples.errors import RegistryError
from goldbach_triples.protocol.words import BitWord, truncate_hash

logger = logging.getLogger(__name__)

KeyHasher = Callable[[bytes], bytes]


def hashlib_hasher(algorithm: str = "sha256") -> KeyHasher:
    """A hasher backed by a named hashlib algorithm."""
    hashlib.new(algorithm)  # fail early on unknown names

    def hasher(material: bytes) -> bytes:
        return hashlib.new(algorithm, material).digest()

    return hasher


@dataclass(frozen=True)
class Registration:
    """h(K) of one party as stored by the CA."""

    party_id: str
    digest: bytes

    def key_hash(self, width: int) -> BitWord:
        """h(K) cut down to ``width`` bits."""
        return truncate_hash(self.digest, width)


class KeyRegistry:
    """Party id -> registration. Read-only while sessions are running."""

    def __init__(self, hasher: KeyHasher | None = None):
        self._hasher = hasher or hashlib_hasher()
        self._entries: dict[str, Registration] = {}

    def register(self, party_id: str, key_material: bytes | str) -> Registration:
        """Hash a party's private key material and store the digest."""
        if isinstance(key_material, str):
            key_material = key_material.encode()
        return self.register_hash(party_id, self._hasher(key_material))

    def register_hash(self, party_id: str, digest: bytes) -> Registration:
        """Store an already computed digest."""
        if party_id in self._entries:
            raise RegistryError(f"Party already registered: {party_id}")
        registration = Registration(party_id=party_id, digest=bytes(digest))
        self._entries[party_id] = registration
        logger.debug("Registered party %s (%d-bit hash)", party_id, len(digest) * 8)
        return registration

    def get(self, party_id: str) -> Registration:
        try:
            return self._entries[party_id]
        except KeyError:
            raise RegistryError(f"Party not registered: {party_id}") from None

    def require(self, *party_ids: str) -> None:
        for party_id in party_ids:
            self.get(party_id)

    def __contains__(self, party_id: object) -> bool:
        return party_id in self._entries

    def __iter__(self) -> Iterator[Registration]:
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def from_parties(
        cls, parties: Iterable[tuple[str, str]], hasher: KeyHasher | None = None
    ) -> KeyRegistry:
        registry = cls(hasher)
        for party_id, key in parties:
            registry.register(party_id, key)
        return registry
