"""Goldbach Triples - partition census, parity analysis and the GTP key distribution protocol."""

__version__ = "0.1.0"
