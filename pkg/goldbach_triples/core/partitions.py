"""Goldbach triples: enumeration, counting and the triangle restriction.

A Goldbach triple of an odd ``n`` is an unordered multiset of three primes
(repetition allowed, 2 allowed) that sums to ``n``. Triples are stored sorted,
``p1 <= p2 <= p3``, and always listed in lexicographic order.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from goldbach_triples.core.primes import PrimeTable
from goldbach_triples.errors import PreconditionError

MIN_ODD = 7


@dataclass(frozen=True, order=True)
class GoldbachTriple:
    """Sorted triple of primes."""

    p1: int
    p2: int
    p3: int

    def __post_init__(self) -> None:
        if not self.p1 <= self.p2 <= self.p3:
            raise PreconditionError(
                "unsorted", f"triple must be sorted ascending, got {self.as_tuple()}"
            )

    @classmethod
    def from_primes(
        cls, primes: Sequence[int], table: PrimeTable, n: int | None = None
    ) -> GoldbachTriple:
        """Sort and check three primes: each in ``table``, odd sum, and ``n`` if given."""
        values = sorted(primes)
        if len(values) != 3:
            raise PreconditionError("not_a_triple", f"expected three primes, got {tuple(primes)}")
        for p in values:
            if not 0 <= p <= table.limit:
                raise PreconditionError(
                    "out_of_range", f"{p} is outside the sieved range [0, {table.limit}]"
                )
            if not table.is_prime(p):
                raise PreconditionError("not_prime", f"{p} is not prime")
        triple = cls(*values)
        if triple.n % 2 == 0:
            raise PreconditionError("n_even", f"{triple} has an even sum")
        if n is not None and triple.n != n:
            raise PreconditionError("sum_mismatch", f"{tuple(primes)} does not sum to {n}")
        return triple

    @property
    def n(self) -> int:
        return self.p1 + self.p2 + self.p3

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.p1, self.p2, self.p3)

    def __str__(self) -> str:
        return f"{self.n}={self.p1}+{self.p2}+{self.p3}"


def parity_code(count: int) -> int:
    """+1 for an odd count, -1 for an even one."""
    return 1 if count % 2 else -1


@dataclass(frozen=True)
class PartitionCensus:
    """Per-number record of unrestricted (g) and triangular (t) triple counts."""

    n: int
    g: int
    t: int

    @property
    def parity_g(self) -> int:
        return parity_code(self.g)

    @property
    def parity_t(self) -> int:
        return parity_code(self.t)

    def count(self, which: str) -> int:
        """Select ``g`` or ``t`` by name (``unrestricted``/``g`` or ``triangular``/``t``)."""
        if which in ("g", "unrestricted"):
            return self.g
        if which in ("t", "triangular"):
            return self.t
        raise PreconditionError("unknown_field", f"unknown census field: {which!r}")

    def to_row(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "g": self.g,
            "t": self.t,
            "parity_g": self.parity_g,
            "parity_t": self.parity_t,
        }


def _check_odd_target(n: int, table: PrimeTable) -> None:
    if n % 2 == 0:
        raise PreconditionError("n_even", f"n must be odd, got {n}")
    if n < MIN_ODD:
        raise PreconditionError("n_too_small", f"n must be >= {MIN_ODD}, got {n}")
    if table.limit < n:
        raise PreconditionError(
            "table_too_small", f"prime table limit {table.limit} is below n = {n}"
        )


def enumerate_triples(n: int, table: PrimeTable) -> list[GoldbachTriple]:
    """Every Goldbach triple of ``n``, each once, lexicographically ordered."""
    _check_odd_target(n, table)

    triples: list[GoldbachTriple] = []
    for p1 in table.primes_between(2, n // 3):
        rest = n - p1
        for p2 in table.primes_between(p1, rest // 2):
            p3 = rest - p2
            if table.is_prime(p3):
                triples.append(GoldbachTriple(p1, p2, p3))
    return triples


def _candidates(n: int, table: PrimeTable) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Per smallest prime p1: the p3 candidates (ascending p2) and which are prime."""
    mask = table.as_mask()
    primes = table.as_array()
    for p1 in table.primes_between(2, n // 3):
        rest = n - p1
        lo = int(np.searchsorted(primes, p1, side="left"))
        hi = int(np.searchsorted(primes, rest // 2, side="right"))
        p3 = rest - primes[lo:hi]
        yield p1, p3, mask[p3]


def _count(n: int, table: PrimeTable, triangular: bool) -> int:
    total = 0
    for _, p3, hits in _candidates(n, table):
        if triangular:
            hits = hits & (2 * p3 < n)
        total += int(np.count_nonzero(hits))
    return total


def count_triples(n: int, table: PrimeTable) -> int:
    """g(n): number of Goldbach triples of ``n``."""
    _check_odd_target(n, table)
    return _count(n, table, triangular=False)


def nth_triple(n: int, table: PrimeTable, index: int) -> GoldbachTriple:
    """``enumerate_triples(n, table)[index]`` without building the whole list."""
    _check_odd_target(n, table)
    if index < 0:
        raise PreconditionError("out_of_range", f"index must be >= 0, got {index}")
    remaining = index
    for p1, p3, hits in _candidates(n, table):
        found = np.flatnonzero(hits)
        if remaining < found.size:
            c = int(p3[found[remaining]])
            return GoldbachTriple(p1, n - p1 - c, c)
        remaining -= found.size
    raise PreconditionError("out_of_range", f"{n} has only {index - remaining} triples")


def is_triangular(triple: GoldbachTriple) -> bool:
    """True iff the three primes can be side lengths of a triangle."""
    return triple.p3 < triple.p1 + triple.p2


def enumerate_triangular(n: int, table: PrimeTable) -> list[GoldbachTriple]:
    """Goldbach triples of ``n`` that satisfy the triangle inequality."""
    return [t for t in enumerate_triples(n, table) if is_triangular(t)]


def count_triangular(n: int, table: PrimeTable) -> int:
    """t(n): number of triangular Goldbach triples of ``n``.

    With a+b+c = n, ``c < a + b`` is the same as ``2c < n``.
    """
    _check_odd_target(n, table)
    return _count(n, table, triangular=True)


def count_pairs(m: int, table: PrimeTable) -> int:
    """Number of unordered prime pairs {a <= b} with a + b = m."""
    if m > table.limit:
        raise PreconditionError(
            "table_too_small", f"prime table limit {table.limit} is below m = {m}"
        )
    return sum(1 for a in table.primes_between(2, m // 2) if table.is_prime(m - a))


def _indicator(table: PrimeTable, limit: int, scale: int) -> np.ndarray:
    out = np.zeros(limit + 1, dtype=np.int64)
    scaled = table.as_array() * scale
    out[scaled[scaled <= limit]] = 1
    return out


def _convolve(x: np.ndarray, y: np.ndarray, limit: int) -> np.ndarray:
    """Integer convolution of two series truncated to degree ``limit``, via a real FFT.

    Exact after rounding while the products stay well inside float64 precision,
    which holds for every table below the sieve ceiling.
    """
    size = 1 << (len(x) + len(y) - 1).bit_length()
    spectrum = np.fft.rfft(x, size) * np.fft.rfft(y, size)
    return np.rint(np.fft.irfft(spectrum, size)[: limit + 1]).astype(np.int64)


def _pair_counts(table: PrimeTable, limit: int) -> np.ndarray:
    a = _indicator(table, limit, 1)
    ordered = _convolve(a, a, limit)
    return (ordered + _indicator(table, limit, 2)) // 2


def goldbach_counts(limit: int, table: PrimeTable) -> np.ndarray:
    """g(m) for every m in [0, limit], indexed by m.

    Counts multisets of three primes by averaging over the symmetric group:
    (A(x)^3 + 3 A(x) A(x^2) + 2 A(x^3)) / 6, where A is the prime indicator series.
    Even m are included; only odd entries are Goldbach triple counts.
    """
    if table.limit < limit:
        raise PreconditionError(
            "table_too_small", f"prime table limit {table.limit} is below {limit}"
        )
    a = _indicator(table, limit, 1)
    a_sq = _convolve(a, a, limit)
    cubed = _convolve(a_sq, a, limit)
    mixed = _convolve(a, _indicator(table, limit, 2), limit)
    diagonal = _indicator(table, limit, 3)
    return (cubed + 3 * mixed + 2 * diagonal) // 6


def triangular_counts(
    limit: int, table: PrimeTable, unrestricted: np.ndarray | None = None
) -> np.ndarray:
    """t(m) for every odd m in [0, limit].

    A triple fails the triangle test exactly when its largest prime c exceeds
    m / 2, and then the other two form any prime pair summing to m - c.
    """
    g = goldbach_counts(limit, table) if unrestricted is None else unrestricted
    pairs = _pair_counts(table, limit)
    degenerate = np.zeros(limit + 1, dtype=np.int64)
    for c in table.primes_between(2, limit):
        stop = min(2 * c, limit + 1)
        degenerate[c:stop] += pairs[: stop - c]
    return g - degenerate


def census_range(lo: int, hi: int, table: PrimeTable) -> list[PartitionCensus]:
    """One census per odd n in [lo, hi], ascending."""
    if lo > hi:
        raise PreconditionError("range_order", f"lo ({lo}) must not exceed hi ({hi})")
    _check_odd_target(lo, table)
    _check_odd_target(hi, table)

    g = goldbach_counts(hi, table)
    t = triangular_counts(hi, table, unrestricted=g)
    return [PartitionCensus(n=n, g=int(g[n]), t=int(t[n])) for n in range(lo, hi + 1, 2)]
