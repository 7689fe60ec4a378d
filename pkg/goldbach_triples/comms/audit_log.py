"""Append-only, line-oriented audit trail of GTP sessions.

One record per line, as space separated ``key=value`` fields::

    session_id=00000000000000b5 n=181 p1=31 p2=67 p3=83 width=7 parties=alice,bob timestamp=2026-01-01T00:00:00+00:00
"""

from __future__ import annotations

import logging
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from goldbach_triples.core.primes import DEFAULT_SIEVE_CEILING, PrimeTable, sieve_up_to
from goldbach_triples.errors import PreconditionError
from goldbach_triples.protocol.gtp import AuditRecord, verify_audit

logger = logging.getLogger(__name__)

FIELDS = ("session_id", "n", "p1", "p2", "p3", "width", "parties", "timestamp")
_PARTY_ID = re.compile(r"[A-Za-z0-9_.@-]+")


@dataclass(frozen=True)
class AuditProblem:
    """A line of the log that could not be trusted."""

    line_no: int
    reason: str
    raw: str

    def __str__(self) -> str:
        return f"line {self.line_no}: {self.reason}"


@dataclass
class AuditLoad:
    """Records in append order plus anything that was flagged."""

    records: list[AuditRecord] = field(default_factory=list)
    problems: list[AuditProblem] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.problems


def format_record(record: AuditRecord) -> str:
    for party in record.parties:
        if not _PARTY_ID.fullmatch(party):
            raise PreconditionError("bad_party_id", f"party id not loggable: {party!r}")
    values = {
        "session_id": f"{record.session_id:016x}",
        "n": str(record.n),
        "p1": str(record.p1),
        "p2": str(record.p2),
        "p3": str(record.p3),
        "width": str(record.width),
        "parties": ",".join(record.parties),
        "timestamp": record.timestamp.isoformat(),
    }
    return " ".join(f"{key}={values[key]}" for key in FIELDS)


def parse_record(line: str) -> AuditRecord:
    """Parse one log line; raises ValueError describing the first defect."""
    values: dict[str, str] = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ValueError(f"token without '=': {token!r}")
        if key not in FIELDS:
            raise ValueError(f"unknown field {key!r}")
        if key in values:
            raise ValueError(f"duplicate field {key!r}")
        values[key] = value

    missing = [key for key in FIELDS if key not in values]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")

    parties = tuple(values["parties"].split(","))
    if len(parties) != 2:
        raise ValueError(f"expected two parties, got {values['parties']!r}")

    return AuditRecord(
        session_id=int(values["session_id"], 16),
        n=int(values["n"]),
        p1=int(values["p1"]),
        p2=int(values["p2"]),
        p3=int(values["p3"]),
        width=int(values["width"]),
        timestamp=datetime.fromisoformat(values["timestamp"]),
        parties=(parties[0], parties[1]),
    )


class AuditLog:
    """File-backed audit trail. Appends are serialised through one lock."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: AuditRecord) -> None:
        """Append one record as a single line."""
        line = format_record(record)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        logger.debug("Audit record %016x appended to %s", record.session_id, self.path)

    def load(
        self, table: PrimeTable | None = None, *, sieve_ceiling: int = DEFAULT_SIEVE_CEILING
    ) -> AuditLoad:
        """Read every record in append order, each checked with :func:`verify_audit`.

        Unparseable lines and records failing verification are flagged with
        their line number and skipped. Without a ``table`` one is sieved up to
        the largest N in the log, but never past ``sieve_ceiling``; shares
        beyond the table are then flagged as out of range.
        """
        result = AuditLoad()
        if not self.path.exists():
            return result

        parsed: list[tuple[int, str, AuditRecord]] = []
        with open(self.path, encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    parsed.append((line_no, line, parse_record(line)))
                except ValueError as e:
                    result.problems.append(AuditProblem(line_no, f"unparseable: {e}", line))

        if table is None:
            largest = max((r.n for _, _, r in parsed if 0 <= r.n <= sieve_ceiling), default=0)
            table = sieve_up_to(largest)

        for line_no, line, record in parsed:
            verdict = verify_audit(record, table)
            if not verdict:
                result.problems.append(
                    AuditProblem(line_no, "corrupt: " + "; ".join(verdict.reasons), line)
                )
                continue
            result.records.append(record)

        result.problems.sort(key=lambda problem: problem.line_no)
        for problem in result.problems:
            logger.warning("Audit log %s %s", self.path, problem)
        return result


def append_audit(record: AuditRecord, log: AuditLog) -> None:
    log.append(record)


def load_audit(log: AuditLog, table: PrimeTable | None = None) -> AuditLoad:
    return log.load(table)
