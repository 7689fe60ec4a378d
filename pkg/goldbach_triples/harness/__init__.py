"""Deterministic session harness: orchestration, transcripts and the eavesdropper view."""

from goldbach_triples.harness.orchestrator import (
    EveView,
    FrozenClock,
    Outcome,
    SessionConfig,
    SessionOrchestrator,
    SessionResult,
    Transcript,
    TranscriptEntry,
    run_session,
    scan_for_plaintext_key,
)

__all__ = [
    "EveView",
    "FrozenClock",
    "Outcome",
    "SessionConfig",
    "SessionOrchestrator",
    "SessionResult",
    "Transcript",
    "TranscriptEntry",
    "run_session",
    "scan_for_plaintext_key",
]
