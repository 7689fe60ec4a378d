"""Wire codec, in-memory links and the audit trail."""

from goldbach_triples.comms.audit_log import AuditLog, append_audit, load_audit
from goldbach_triples.comms.channel import InMemoryLink, TamperSpec, flip_nonce_bit, flip_payload_bit
from goldbach_triples.comms.codec import decode_message, encode_message

__all__ = [
    "AuditLog",
    "InMemoryLink",
    "TamperSpec",
    "append_audit",
    "decode_message",
    "encode_message",
    "flip_nonce_bit",
    "flip_payload_bit",
    "load_audit",
]
