import pytest

from goldbach_triples.core.primes import is_prime, sieve_up_to
from goldbach_triples.errors import PreconditionError


def trial_division(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


@pytest.mark.parametrize("limit", [0, 1])
def test_tiny_limits_are_empty(limit):
    assert sieve_up_to(limit).primes == ()


def test_sieve_ten():
    assert sieve_up_to(10).primes == (2, 3, 5, 7)


def test_sieve_hundred():
    table = sieve_up_to(100)
    assert len(table) == 25
    assert table.primes[-1] == 97
    assert list(table.primes) == [q for q in range(101) if trial_division(q)]


def test_membership_matches_trial_division():
    table = sieve_up_to(100_000)
    for q in range(0, 100_001, 997):
        assert is_prime(q, table) == trial_division(q)

    composite = bytearray(100_001)
    for d in range(2, 317):
        for multiple in range(d * d, 100_001, d):
            composite[multiple] = 1
    expected = [q for q in range(2, 100_001) if not composite[q]]
    assert list(table.primes) == expected
    assert len(table) == 9592


@pytest.mark.parametrize("q,expected", [(2, True), (9, False), (1, False), (0, False), (7, True)])
def test_is_prime_small(q, expected):
    assert is_prime(q, sieve_up_to(10)) is expected


def test_is_prime_97():
    assert is_prime(97, sieve_up_to(100))


def test_out_of_range_is_reported():
    with pytest.raises(PreconditionError) as exc:
        is_prime(11, sieve_up_to(10))
    assert exc.value.reason == "out_of_range"


def test_negative_limit_rejected():
    with pytest.raises(PreconditionError):
        sieve_up_to(-1)


def test_prefix_property():
    small, large = sieve_up_to(500), sieve_up_to(5000)
    assert large.primes[: len(small)] == small.primes


def test_primes_between():
    table = sieve_up_to(100)
    assert table.primes_between(10, 30) == (11, 13, 17, 19, 23, 29)
    assert table.primes_between(24, 28) == ()


def test_table_is_read_only():
    table = sieve_up_to(50)
    with pytest.raises(ValueError):
        table.as_mask()[4] = True
