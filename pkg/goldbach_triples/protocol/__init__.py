"""Goldbach Triples Protocol: words, registry, CA operations and parties."""

from goldbach_triples.protocol.gtp import (
    AuditRecord,
    AuditVerdict,
    GtpMessage,
    Role,
    SessionSetup,
    Step,
    ca_create_session,
    ca_step1,
    ca_step2,
    eavesdropper_combine,
    expand_session_key,
    party_derive_key,
    verify_audit,
)
from goldbach_triples.protocol.parties import Eavesdropper, Party, PartyStatus
from goldbach_triples.protocol.registry import KeyRegistry, Registration, hashlib_hasher
from goldbach_triples.protocol.words import BitWord, truncate_hash, xor_mask

__all__ = [
    "AuditRecord",
    "AuditVerdict",
    "BitWord",
    "Eavesdropper",
    "GtpMessage",
    "KeyRegistry",
    "Party",
    "PartyStatus",
    "Registration",
    "Role",
    "SessionSetup",
    "Step",
    "ca_create_session",
    "ca_step1",
    "ca_step2",
    "eavesdropper_combine",
    "expand_session_key",
    "hashlib_hasher",
    "party_derive_key",
    "truncate_hash",
    "verify_audit",
    "xor_mask",
]
