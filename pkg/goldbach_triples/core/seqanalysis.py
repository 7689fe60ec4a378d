"""Parity sequences, circular autocorrelation and band structure of g(n) and t(n)."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from goldbach_triples.core.partitions import PartitionCensus
from goldbach_triples.errors import PreconditionError

logger = logging.getLogger(__name__)

CensusField = Literal["unrestricted", "triangular", "g", "t"]

RESIDUE_CLASSES = (1, 3, 5)


@dataclass(frozen=True)
class BipolarSequence:
    """A +1/-1 sequence and where it came from."""

    values: tuple[int, ...]
    origin: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.values:
            raise PreconditionError("empty_input", "bipolar sequence must be non-empty")
        if any(v not in (1, -1) for v in self.values):
            raise PreconditionError("not_bipolar", "values must all be +1 or -1")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AutocorrelationResult:
    """C(k) for k = 0..n-1 over one period of length n.

    ``sums`` holds the exact integer correlation sums; ``c`` is ``sums / n``.
    """

    period: int
    sums: tuple[int, ...]

    @property
    def c(self) -> tuple[float, ...]:
        return tuple(s / self.period for s in self.sums)

    def rows(self) -> list[tuple[int, float]]:
        return list(enumerate(self.c))


@dataclass(frozen=True)
class BandViolation:
    """One failure of the band inequalities at index k."""

    k: int
    relation: str
    left_n: int
    left_g: int
    right_n: int
    right_g: int

    def __str__(self) -> str:
        return (
            f"k={self.k}: {self.relation} violated "
            f"(g({self.left_n})={self.left_g}, g({self.right_n})={self.right_g})"
        )


@dataclass(frozen=True)
class ClassStats:
    """Summary of counts within one residue class mod 6."""

    residue: int
    count: int
    mean: float
    minimum: int
    maximum: int


def _normalise_field(which: str) -> str:
    if which in ("unrestricted", "g"):
        return "g"
    if which in ("triangular", "t"):
        return "t"
    raise PreconditionError("unknown_field", f"unknown census field: {which!r}")


def parity_sequence(
    census: Sequence[PartitionCensus], which: CensusField = "unrestricted"
) -> BipolarSequence:
    """+1 where the selected count is odd, -1 where it is even."""
    if not census:
        raise PreconditionError("empty_input", "census must be non-empty")
    key = _normalise_field(which)
    values = tuple(1 if rec.count(key) % 2 else -1 for rec in census)
    return BipolarSequence(
        values=values,
        origin={"field": key, "lo": census[0].n, "hi": census[-1].n},
    )


def autocorrelation(seq: BipolarSequence) -> AutocorrelationResult:
    """Circular autocorrelation C(k) = (1/n) sum_j a_j a_{(j+k) mod n}."""
    a = np.asarray(seq.values, dtype=np.int64)
    n = len(a)
    sums = tuple(int(np.dot(a, np.roll(a, -k))) for k in range(n))
    return AutocorrelationResult(period=n, sums=sums)


def max_off_peak(result: AutocorrelationResult) -> float:
    """Largest |C(k)| for 1 <= k < n/2; 0.0 when there is no such k."""
    c = result.c
    lags = [abs(c[k]) for k in range(1, result.period) if 2 * k < result.period]
    return max(lags, default=0.0)


def assess_pseudorandomness(result: AutocorrelationResult, threshold: float = 0.25) -> float:
    """Return the off-peak maximum, warning when it exceeds ``threshold``."""
    peak = max_off_peak(result)
    if peak > threshold:
        logger.warning(
            "Off-peak autocorrelation %.6f exceeds soft threshold %.2f (period %d)",
            peak,
            threshold,
            result.period,
        )
    else:
        logger.info("Off-peak autocorrelation %.6f (period %d)", peak, result.period)
    return peak


def _by_n(census: Sequence[PartitionCensus]) -> dict[int, PartitionCensus]:
    return {rec.n: rec for rec in census}


def check_band_inequalities(
    census: Sequence[PartitionCensus], k_min: int = 10
) -> list[BandViolation]:
    """Check g(6k+3) <= g(6k+7) and g(6k+5) >= g(6k+3) for every k > k_min in range.

    The k range runs over every k whose 6k+3 lies inside the census. A gap
    (an odd n between the census bounds with no record) is an error.
    """
    if not census:
        return []
    index = _by_n(census)
    lo, hi = min(index), max(index)
    for n in range(lo, hi + 1, 2):
        if n not in index:
            raise PreconditionError("census_gap", f"census has no record for n = {n}")

    violations: list[BandViolation] = []
    k = max(k_min + 1, -(-(lo - 3) // 6))
    while 6 * k + 3 <= hi:
        base = index.get(6 * k + 3)
        upper = index.get(6 * k + 7)
        middle = index.get(6 * k + 5)
        if base is not None and upper is not None and base.g > upper.g:
            violations.append(
                BandViolation(k, "g(6k+3) <= g(6k+7)", base.n, base.g, upper.n, upper.g)
            )
        if base is not None and middle is not None and middle.g < base.g:
            violations.append(
                BandViolation(k, "g(6k+5) >= g(6k+3)", middle.n, middle.g, base.n, base.g)
            )
        k += 1
    return violations


def local_extrema(
    census: Sequence[PartitionCensus], which: CensusField = "unrestricted"
) -> tuple[list[int], list[int]]:
    """Strict interior local minima and maxima of the selected count."""
    key = _normalise_field(which)
    minima: list[int] = []
    maxima: list[int] = []
    for prev, cur, nxt in zip(census, census[1:], census[2:]):
        left, mid, right = prev.count(key), cur.count(key), nxt.count(key)
        if mid < left and mid < right:
            minima.append(cur.n)
        elif mid > left and mid > right:
            maxima.append(cur.n)
    return minima, maxima


def period_six_exceptions(census: Sequence[PartitionCensus]) -> list[int]:
    """Interior n = 3 (mod 6) that are not strict local minima of g."""
    minima, _ = local_extrema(census)
    minimum_set = set(minima)
    return [
        cur.n
        for cur in census[1:-1]
        if cur.n % 6 == 3 and cur.n not in minimum_set
    ]


def band_summary(
    census: Sequence[PartitionCensus], which: CensusField = "unrestricted"
) -> dict[int, ClassStats]:
    """Count, mean, min and max per residue class n mod 6 (only classes present)."""
    if not census:
        raise PreconditionError("empty_input", "census must be non-empty")
    key = _normalise_field(which)
    summary: dict[int, ClassStats] = {}
    for residue in RESIDUE_CLASSES:
        values = np.array([rec.count(key) for rec in census if rec.n % 6 == residue])
        if values.size == 0:
            continue
        summary[residue] = ClassStats(
            residue=residue,
            count=int(values.size),
            mean=float(values.mean()),
            minimum=int(values.min()),
            maximum=int(values.max()),
        )
    return summary
