"""Core number theory: primes, Goldbach triples and sequence analysis."""

from goldbach_triples.core.config import Config, load_config
from goldbach_triples.core.partitions import (
    GoldbachTriple,
    PartitionCensus,
    census_range,
    count_triangular,
    count_triples,
    enumerate_triangular,
    enumerate_triples,
    is_triangular,
    nth_triple,
)
from goldbach_triples.core.primes import PrimeTable, is_prime, sieve_up_to

__all__ = [
    "Config",
    "GoldbachTriple",
    "PartitionCensus",
    "PrimeTable",
    "census_range",
    "count_triangular",
    "count_triples",
    "enumerate_triangular",
    "enumerate_triples",
    "is_prime",
    "is_triangular",
    "load_config",
    "nth_triple",
    "sieve_up_to",
]
