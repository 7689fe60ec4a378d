"""Shared fixtures."""

from datetime import datetime, timezone

import pytest

from goldbach_triples.core.partitions import census_range
from goldbach_triples.core.primes import sieve_up_to
from goldbach_triples.harness.orchestrator import FrozenClock
from goldbach_triples.protocol.registry import KeyRegistry

# Worked example session: N = 181 = 31 + 67 + 83, h(Ka) = 47, h(Kb) = 99.
EXAMPLE_N = 181
EXAMPLE_ROLES = (31, 67, 83)
EXAMPLE_HASH_A = 47
EXAMPLE_HASH_B = 99


@pytest.fixture(scope="session")
def table():
    return sieve_up_to(20000)


@pytest.fixture(scope="session")
def census(table):
    return census_range(9, 2001, table)


@pytest.fixture
def example_registry():
    registry = KeyRegistry()
    registry.register_hash("alice", bytes([EXAMPLE_HASH_A]))
    registry.register_hash("bob", bytes([EXAMPLE_HASH_B]))
    return registry


@pytest.fixture
def registry():
    return KeyRegistry.from_parties([("alice", "alice-secret"), ("bob", "bob-secret")])


@pytest.fixture
def frozen_clock():
    return FrozenClock(datetime(2026, 1, 1, tzinfo=timezone.utc))
