"""Prime table built with a numpy sieve of Eratosthenes."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

import numpy as np

from goldbach_triples.errors import PreconditionError

# Largest table built on behalf of untrusted input such as an audit log line.
DEFAULT_SIEVE_CEILING = 10_000_000


@dataclass(frozen=True)
class PrimeTable:
    """Ascending primes up to an inclusive ``limit`` with O(1) membership.

    Immutable once built: the numpy buffers are flagged read-only, so a
    table can be shared between threads without copying.
    """

    limit: int
    primes: tuple[int, ...]
    _mask: np.ndarray = field(repr=False, compare=False)
    _array: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.primes)

    def is_prime(self, q: int) -> bool:
        """Membership query; ``q`` must lie in ``[0, limit]``."""
        if q < 0 or q > self.limit:
            raise PreconditionError(
                "out_of_range", f"{q} is outside the sieved range [0, {self.limit}]"
            )
        return bool(self._mask[q])

    def as_mask(self) -> np.ndarray:
        """Boolean membership vector of length ``limit + 1``."""
        return self._mask

    def as_array(self) -> np.ndarray:
        """Primes as an int64 array."""
        return self._array

    def primes_between(self, lo: int, hi: int) -> tuple[int, ...]:
        """Primes p with lo <= p <= hi."""
        start = bisect_left(self.primes, lo)
        stop = bisect_right(self.primes, hi)
        return self.primes[start:stop]


def sieve_up_to(limit: int) -> PrimeTable:
    """Sieve every prime <= ``limit``. Limits 0 and 1 give an empty table."""
    if limit < 0:
        raise PreconditionError("out_of_range", f"limit must be >= 0, got {limit}")

    mask = np.ones(limit + 1, dtype=bool)
    mask[: min(2, limit + 1)] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False

    array = np.flatnonzero(mask).astype(np.int64)
    mask.setflags(write=False)
    array.setflags(write=False)

    return PrimeTable(
        limit=limit,
        primes=tuple(int(p) for p in array),
        _mask=mask,
        _array=array,
    )


def is_prime(q: int, table: PrimeTable) -> bool:
    """True iff ``q`` is prime. Raises PreconditionError past ``table.limit``."""
    return table.is_prime(q)
