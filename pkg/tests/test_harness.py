import pytest
from pydantic import ValidationError

from goldbach_triples.comms.audit_log import AuditLog
from goldbach_triples.comms.channel import InMemoryLink, TamperSpec, flip_nonce_bit, flip_payload_bit
from goldbach_triples.comms.codec import decode_message, encode_message
from goldbach_triples.errors import HarnessInvariantError, NonceMismatchError, PreconditionError
from goldbach_triples.harness.orchestrator import (
    SessionConfig,
    SessionOrchestrator,
    run_session,
    scan_for_plaintext_key,
)
from goldbach_triples.protocol.gtp import GtpMessage, Step
from goldbach_triples.protocol.registry import KeyRegistry
from goldbach_triples.protocol.words import BitWord

from .conftest import EXAMPLE_N, EXAMPLE_ROLES


def example_config(**overrides):
    return SessionConfig(
        n=EXAMPLE_N, triple=EXAMPLE_ROLES, roles=EXAMPLE_ROLES, width=7, **overrides
    )


def test_worked_example_session(example_registry, table, frozen_clock):
    transcript, audit, eve = run_session(
        example_config(tap="both"), example_registry, table, clock=frozen_clock
    )
    assert transcript.complete
    assert [transcript.payload(s).bits for s in Step] == ["0110000", "0100000", "1001100", "0010000"]
    assert [e.direction for e in transcript.entries] == ["CA->A", "CA->B", "CA->A", "CA->B"]
    assert transcript.outcome.keys_match
    assert transcript.outcome.derived_key_a == transcript.outcome.derived_key_b == BitWord(83, 7)
    assert (audit.n, audit.p1, audit.p2, audit.p3) == (181, 31, 67, 83)
    assert audit.timestamp == frozen_clock()
    assert eve.combination == BitWord(92, 7)
    assert eve.step1_view() == {Step.S1A: BitWord(48, 7), Step.S1B: BitWord(32, 7)}


def test_same_seed_same_bytes(registry, table, frozen_clock):
    config = SessionConfig(n_range=(101, 9999), seed=99, nonce_required=True)
    first = run_session(config, registry, table, clock=frozen_clock)
    second = run_session(config, registry, table, clock=frozen_clock)
    assert first[0].frames == second[0].frames
    assert first[1] == second[1]
    third = run_session(config.model_copy(update={"seed": 100}), registry, table, clock=frozen_clock)
    assert third[0].frames != first[0].frames


def test_single_tap(example_registry, table):
    _, _, eve = run_session(example_config(tap="a"), example_registry, table)
    assert {link for link, _ in eve.captured} == {"a"}
    assert eve.combination is None


def test_no_tap(example_registry, table):
    _, _, eve = run_session(example_config(), example_registry, table)
    assert eve.captured == () and eve.combination is None


def test_tampered_step_two_breaks_agreement(example_registry, table):
    transcript, _, eve = run_session(
        example_config(tap="both", tamper=["2a:bit3"]), example_registry, table
    )
    outcome = transcript.outcome
    assert not outcome.keys_match
    assert outcome.derived_key_a == BitWord(83 ^ 0b1000, 7)
    assert outcome.derived_key_b == BitWord(83, 7)
    assert transcript.payload(Step.S2A) == BitWord(0b1001100 ^ 0b1000, 7)
    assert eve.combination == BitWord(92 ^ 0b1000, 7)


def test_unmask_early_reaches_the_same_key(registry, table):
    late = run_session(SessionConfig(n=999, seed=4), registry, table)[0]
    early = run_session(SessionConfig(n=999, seed=4, unmask_early=True), registry, table)[0]
    assert late.outcome == early.outcome
    assert early.outcome.keys_match


def test_audit_log_is_appended(registry, table, tmp_path):
    log = AuditLog(tmp_path / "gtp.log")
    for seed in range(3):
        run_session(SessionConfig(n_range=(101, 999), seed=seed), registry, table, audit_log=log)
    loaded = log.load(table)
    assert loaded.clean and len(loaded.records) == 3


def test_events(example_registry, table, frozen_clock):
    events = []
    SessionOrchestrator(example_registry, table, clock=frozen_clock, on_event=events.append).run(
        example_config()
    )
    kinds = [e["type"] for e in events]
    assert kinds[0] == "session_created" and kinds[-1] == "session_completed"
    assert kinds.count("message_sent") == 4
    statuses = [e["status"] for e in events if e["type"] == "party_status"]
    assert statuses.count("keyed") == 2
    assert events[-1]["keysMatch"] is True
    assert all(e["timestamp"] == "2026-01-01T00:00:00+00:00" for e in events)


def zero_hash_registry(hash_a=b"\x00"):
    registry = KeyRegistry()
    registry.register_hash("alice", hash_a)
    registry.register_hash("bob", b"\x00")
    return registry


def test_plaintext_scan_on_honest_session(table):
    registry = zero_hash_registry()
    result = SessionOrchestrator(registry, table).run(example_config())
    assert scan_for_plaintext_key(result.transcript, result.setup, registry) == []


def test_plaintext_scan_tells_coincidence_from_leak(table):
    # h(Ka) = P1 ^ P3 makes the 1a payload equal P3 while the cover is not zero.
    registry = zero_hash_registry(bytes([31 ^ 83]))
    result = SessionOrchestrator(registry, table).run(example_config())
    findings = scan_for_plaintext_key(result.transcript, result.setup, registry)
    assert [(f.step, f.leak) for f in findings] == [(Step.S1A, False)]


def test_zero_cover_on_equal_shares_is_a_leak(table):
    with pytest.raises(HarnessInvariantError, match="plaintext on 1a"):
        SessionOrchestrator(zero_hash_registry(), table).run(SessionConfig(n=9, roles=(3, 3, 3)))


def test_config_validation():
    with pytest.raises(ValidationError):
        SessionConfig()
    with pytest.raises(ValidationError):
        SessionConfig(n=9, n_range=(9, 99))
    with pytest.raises(ValidationError):
        SessionConfig(n=9, tap="c")
    assert SessionConfig(n=9, tap="both").tap == frozenset({"a", "b"})
    assert SessionConfig(n=9, tamper=["1B:3"]).tamper == [TamperSpec(Step.S1B, 3)]


def test_tamper_spec_parse():
    assert TamperSpec.parse("2a:bit3") == TamperSpec(Step.S2A, 3)
    assert str(TamperSpec.parse(" 2b : 0 ")) == "2b:bit0"
    with pytest.raises(PreconditionError):
        TamperSpec.parse("3a:bit1")


def test_link_taps_see_delivered_frames():
    received, tapped = [], []
    link = InMemoryLink(
        "a", receiver=received.append, tamper=flip_payload_bit(TamperSpec(Step.S1A, 0))
    )
    link.add_tap(lambda name, frame: tapped.append((name, frame)))
    frame = encode_message(GtpMessage(1, Step.S1A, BitWord(2, 7)))
    delivered = link.send(frame)
    assert decode_message(delivered).payload == BitWord(3, 7)
    assert received == [delivered] and tapped == [("a", delivered)] and link.frames == [delivered]

    untouched = encode_message(GtpMessage(1, Step.S2A, BitWord(2, 7)))
    assert link.send(untouched) == untouched


@pytest.mark.parametrize("spec", ["1a:nonce", "2b:nonce7"])
def test_nonce_tamper_aborts_session(spec, example_registry, table):
    with pytest.raises(NonceMismatchError):
        run_session(example_config(nonce_required=True, tamper=[spec]), example_registry, table)


def test_nonce_tamper_without_nonces_changes_nothing(example_registry, table):
    transcript, _, _ = run_session(example_config(tamper=["2a:nonce"]), example_registry, table)
    assert transcript.outcome.keys_match


def test_nonce_tamper_spec():
    assert TamperSpec.parse("2B:nonce") == TamperSpec(Step.S2B, 0, "nonce")
    assert str(TamperSpec.parse("1a:nonce63")) == "1a:nonce63"
    with pytest.raises(PreconditionError):
        TamperSpec.parse("1a:nonce64")


def test_nonce_hook_flips_only_the_nonce():
    frame = encode_message(GtpMessage(1, Step.S2A, BitWord(2, 7), nonce=0b100))
    tampered = decode_message(flip_nonce_bit(TamperSpec(Step.S2A, 2, "nonce"))(frame))
    assert tampered.nonce == 0 and tampered.payload == BitWord(2, 7)
