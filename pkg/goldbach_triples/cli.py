"""Goldbach Triples CLI - partition tables, sequence data and the GTP demo."""

import csv
import logging
import re
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from goldbach_triples import __version__
from goldbach_triples.core.config import (
    CONFIG_FILENAME,
    DEFAULT_CONFIG_YAML,
    Config,
    Settings,
    get_default_config,
    load_config,
)
from goldbach_triples.core.partitions import (
    census_range,
    enumerate_triangular,
    enumerate_triples,
)
from goldbach_triples.core.primes import PrimeTable, sieve_up_to
from goldbach_triples.core.seqanalysis import (
    assess_pseudorandomness,
    autocorrelation,
    band_summary,
    check_band_inequalities,
    local_extrema,
    parity_sequence,
)
from goldbach_triples.errors import GoldbachError, PreconditionError
from goldbach_triples.protocol.registry import KeyRegistry, hashlib_hasher

app = typer.Typer(
    name="goldbach",
    help="Goldbach triple tables, parity-sequence analysis and the GTP key distribution demo",
    no_args_is_help=True,
)
audit_app = typer.Typer(help="Inspect and verify GTP audit logs", no_args_is_help=True)
app.add_typer(audit_app, name="audit")

console = Console()
logger = logging.getLogger("goldbach_triples")

_state: dict[str, Config] = {}


class AuditVerificationFailed(GoldbachError):
    """The audit log contains flagged lines."""


def get_project_root() -> Path:
    """Find project root by looking for goldbach.yaml."""
    current = Path.cwd()
    while current != current.parent:
        if (current / CONFIG_FILENAME).exists():
            return current
        current = current.parent
    return Path.cwd()


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _get_config() -> Config:
    return _state.get("config") or get_default_config()


@contextmanager
def _handle_errors() -> Iterator[None]:
    """Turn library errors into a single machine-parseable stderr line and exit 1."""
    try:
        yield
    except GoldbachError as e:
        typer.echo(f"error: {type(e).__name__}: {e}", err=True)
        raise typer.Exit(1) from None
    except ValidationError as e:
        details = "; ".join(err["msg"] for err in e.errors())
        typer.echo(f"error: ValidationError: {details}", err=True)
        raise typer.Exit(1) from None


def parse_range(text: str) -> tuple[int, int]:
    """Parse ``N`` or ``LO..HI``, snapping even bounds inward to odd ones."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if not match:
        raise PreconditionError("bad_range", f"expected N or LO..HI, got {text!r}")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo % 2 == 0:
        logger.warning("Range start %d is even; using %d", lo, lo + 1)
        lo += 1
    if hi % 2 == 0:
        logger.warning("Range end %d is even; using %d", hi, hi - 1)
        hi -= 1
    if lo > hi:
        raise PreconditionError("range_order", f"no odd numbers in {text!r}")
    return lo, hi


def _table_for(needed: int) -> PrimeTable:
    sieve = _get_config().sieve
    if needed > sieve.ceiling:
        raise PreconditionError(
            "sieve_ceiling", f"{needed} needs primes past the sieve ceiling {sieve.ceiling}"
        )
    return sieve_up_to(max(needed, sieve.limit))


def _fmt(value: float) -> str:
    return format(value, ".15g")


@app.callback()
def main_callback(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Path to goldbach.yaml"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose logging"),
):
    """Load configuration and set up logging."""
    settings = Settings()
    _configure_logging("DEBUG" if verbose else settings.log_level)

    config_path = config or settings.config or get_project_root() / CONFIG_FILENAME
    if config_path.exists():
        _state["config"] = load_config(config_path)
    elif config is not None:
        typer.echo(f"error: FileNotFoundError: Config file not found: {config_path}", err=True)
        raise typer.Exit(1)
    else:
        _state.pop("config", None)


@app.command()
def init(
    path: Optional[Path] = typer.Argument(None, help="Project path (default: current directory)"),
):
    """Write a default goldbach.yaml."""
    project_path = path or Path.cwd()
    config_path = project_path / CONFIG_FILENAME

    if config_path.exists():
        console.print(f"[yellow]Config already exists:[/] {config_path}")
        raise typer.Exit(1)

    config_path.write_text(DEFAULT_CONFIG_YAML)
    console.print(f"[green]Created:[/] {config_path}")


@app.command()
def count(
    numbers: str = typer.Argument(..., help="Odd N or range LO..HI"),
    triangular: bool = typer.Option(False, "--triangular", "-t", help="Count triangular triples"),
):
    """Print n and its number of Goldbach triples, tab separated."""
    with _handle_errors():
        lo, hi = parse_range(numbers)
        for rec in census_range(lo, hi, _table_for(hi)):
            typer.echo(f"{rec.n}\t{rec.t if triangular else rec.g}")


@app.command(name="enumerate")
def enumerate_cmd(
    n: int = typer.Argument(..., help="Odd number >= 7"),
    triangular: bool = typer.Option(False, "--triangular", "-t", help="Only triangular triples"),
):
    """List the Goldbach triples of N, one per line."""
    with _handle_errors():
        table = _table_for(n)
        triples = enumerate_triangular(n, table) if triangular else enumerate_triples(n, table)
        for triple in triples:
            typer.echo(f"{triple.n}\t{triple.p1}\t{triple.p2}\t{triple.p3}")


@app.command()
def seq(
    numbers: str = typer.Argument(..., help="Range LO..HI"),
    which: str = typer.Option("g", "--which", "-w", help="g (unrestricted) or t (triangular)"),
    autocorr: bool = typer.Option(False, "--autocorr", help="Emit autocorrelation k,c_k"),
    csv_path: Optional[Path] = typer.Option(None, "--csv", help="Write CSV here instead of TSV"),
):
    """Census rows (n,g,t,parity_g,parity_t) or the parity autocorrelation (k,c_k)."""
    with _handle_errors():
        lo, hi = parse_range(numbers)
        census = census_range(lo, hi, _table_for(hi))

        if autocorr:
            result = autocorrelation(parity_sequence(census, which))
            peak = assess_pseudorandomness(result, _get_config().analysis.autocorr_warn_threshold)
            typer.echo(f"max off-peak |c_k| = {_fmt(peak)} (period {result.period})", err=True)
            header = ["k", "c_k"]
            rows = [[str(k), _fmt(c)] for k, c in result.rows()]
        else:
            header = ["n", "g", "t", "parity_g", "parity_t"]
            rows = [[str(rec.to_row()[key]) for key in header] for rec in census]

        if csv_path is None:
            for row in rows:
                typer.echo("\t".join(row))
            return

        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        console.print(f"[green]Wrote[/] {len(rows)} rows to {csv_path}", highlight=False)


@app.command()
def analyze(
    numbers: str = typer.Argument(..., help="Range LO..HI"),
    which: str = typer.Option("g", "--which", "-w", help="g (unrestricted) or t (triangular)"),
    k_min: Optional[int] = typer.Option(None, "--k-min", help="Band inequalities checked for k > K_MIN"),
):
    """Band summary, band inequalities and local extrema over a range."""
    with _handle_errors():
        lo, hi = parse_range(numbers)
        census = census_range(lo, hi, _table_for(hi))
        k_min = _get_config().analysis.band_k_min if k_min is None else k_min

        table = Table(title=f"Residue classes mod 6 ({which}, {lo}..{hi})")
        for column in ("n mod 6", "count", "mean", "min", "max"):
            table.add_column(column, justify="right")
        for residue, stats in band_summary(census, which).items():
            table.add_row(
                str(residue), str(stats.count), f"{stats.mean:.2f}", str(stats.minimum), str(stats.maximum)
            )
        console.print(table)

        minima, maxima = local_extrema(census, which)
        console.print(f"local minima: {' '.join(map(str, minima)) or '-'}", highlight=False)
        console.print(f"local maxima: {' '.join(map(str, maxima)) or '-'}", highlight=False)

        violations = check_band_inequalities(census, k_min)
        if violations:
            for violation in violations:
                console.print(f"[red]{violation}[/]", highlight=False)
        else:
            console.print(f"[green]band inequalities hold for k > {k_min}[/]")


def _demo_parties() -> tuple[str, str]:
    parties = _get_config().parties
    if len(parties) < 2:
        raise PreconditionError("parties", "the demo needs two configured parties")
    return parties[0].id, parties[1].id


def _hash_bytes(value: int, flag: str) -> bytes:
    if not 0 <= value < 1 << 256:
        raise PreconditionError("bad_hashes", f"{flag} must be in [0, 2^256), got {value}")
    return value.to_bytes(32, "big")


def _registry_for_demo(hash_a: int | None, hash_b: int | None) -> KeyRegistry:
    config = _get_config()
    registry = KeyRegistry(hashlib_hasher(config.protocol.hash_algorithm))
    if hash_a is not None and hash_b is not None:
        initiator, responder = _demo_parties()
        registry.register_hash(initiator, _hash_bytes(hash_a, "--hash-a"))
        registry.register_hash(responder, _hash_bytes(hash_b, "--hash-b"))
        return registry
    if (hash_a is None) != (hash_b is None):
        raise PreconditionError("bad_hashes", "--hash-a and --hash-b must be given together")
    for party in config.parties:
        registry.register(party.id, party.key)
    return registry


def _xor_block(left: list[str], right: list[str], labels: tuple[str, str]) -> None:
    typer.echo(f"{labels[0]:<34}{labels[1]}")
    for a, b in zip(left, right):
        typer.echo(f"{a:<34}{b}")


@app.command()
def demo(
    n: Optional[int] = typer.Option(None, "--n", help="Explicit odd N"),
    numbers: Optional[str] = typer.Option(None, "--range", help="Draw N from LO..HI"),
    triple: Optional[str] = typer.Option(None, "--triple", help="P1,P2,P3 in role order"),
    hash_a: Optional[int] = typer.Option(None, "--hash-a", help="Inject h(Ka) as an integer"),
    hash_b: Optional[int] = typer.Option(None, "--hash-b", help="Inject h(Kb) as an integer"),
    width: Optional[int] = typer.Option(None, "--width", help="Session width in bits"),
    seed: int = typer.Option(0, "--seed", help="Randomness seed"),
    tamper: Optional[list[str]] = typer.Option(None, "--tamper", help="Flip a payload or nonce bit, e.g. 2a:bit3 or 2b:nonce"),
    tap: str = typer.Option("both", "--tap", help="Eavesdropper links: a, b, both or none"),
    nonce: bool = typer.Option(False, "--nonce", help="Require and echo-check a session nonce"),
    audit_log: Optional[Path] = typer.Option(None, "--audit-log", help="Append the audit record here"),
):
    """Run one GTP session and print every intermediate word."""
    from goldbach_triples.comms.audit_log import AuditLog
    from goldbach_triples.harness.orchestrator import SessionConfig, SessionOrchestrator
    from goldbach_triples.protocol.gtp import Step

    with _handle_errors():
        config = _get_config()
        initiator, responder = _demo_parties()
        roles = tuple(int(p) for p in triple.split(",")) if triple else None
        if roles is not None and len(roles) != 3:
            raise PreconditionError("bad_triple", f"--triple needs three primes, got {triple!r}")
        if n is None and roles is not None:
            n = sum(roles)
        n_range = None
        if numbers is not None:
            n_range = parse_range(numbers)
        elif n is None:
            n_range = config.protocol.n_range

        session = SessionConfig(
            n=n,
            n_range=n_range,
            seed=seed,
            width=width if width is not None else config.protocol.width,
            nonce_required=nonce or config.protocol.nonce_required,
            tap=frozenset() if tap == "none" else tap,
            triple=roles,
            roles=roles,
            tamper=tamper or [],
            initiator=initiator,
            responder=responder,
        )
        registry = _registry_for_demo(hash_a, hash_b)
        needed = n if n is not None else n_range[1]
        orchestrator = SessionOrchestrator(
            registry,
            _table_for(needed),
            audit_log=AuditLog(audit_log) if audit_log else None,
        )
        result = orchestrator.run(session)

    setup, transcript = result.setup, result.transcript
    h_a = registry.get(setup.initiator).key_hash(setup.width)
    h_b = registry.get(setup.responder).key_hash(setup.width)
    m1a, m1b = transcript.payload(Step.S1A), transcript.payload(Step.S1B)
    m2a, m2b = transcript.payload(Step.S2A), transcript.payload(Step.S2B)
    r5, r6 = m1a ^ m2a, m1b ^ m2b
    final_a, final_b = h_a ^ r5, h_b ^ r6

    typer.echo(f"Session {setup.session_id:016x}: N = {setup.n}, width {setup.width}")
    for label, word in (("P1", setup.p1), ("P2", setup.p2), ("P3", setup.p3), ("h(Ka)", h_a), ("h(Kb)", h_b)):
        typer.echo(f"{label} = {word.value} = {word.bits}")

    typer.echo("\nStep 1:")
    _xor_block(
        [setup.p1.bits, h_a.bits, f"{m1a.bits} -> Result1"],
        [setup.p2.bits, h_b.bits, f"{m1b.bits} -> Result2"],
        ("Alice: P1 ^ h(Ka)", "Bob: P2 ^ h(Kb)"),
    )
    typer.echo("\nStep 2:")
    _xor_block(
        [setup.p1.bits, setup.p3.bits, f"{m2a.bits} -> Result3"],
        [setup.p2.bits, setup.p3.bits, f"{m2b.bits} -> Result4"],
        ("Alice: P1 ^ P3", "Bob: P2 ^ P3"),
    )
    typer.echo("")
    _xor_block(
        [m1a.bits, m2a.bits, f"{r5.bits} -> Result5"],
        [m1b.bits, m2b.bits, f"{r6.bits} -> Result6"],
        ("Alice: Result1 ^ Result3", "Bob: Result2 ^ Result4"),
    )
    typer.echo("\nStep 3:")
    _xor_block(
        [h_a.bits, r5.bits, f"{final_a.bits} -> Final Key"],
        [h_b.bits, r6.bits, f"{final_b.bits} -> Final Key"],
        ("Alice: h(Ka) ^ Result5", "Bob: h(Kb) ^ Result6"),
    )

    typer.echo("")
    if transcript.outcome and transcript.outcome.keys_match:
        typer.echo(f"Keys match: {final_a.bits} = P3 = {setup.p3.value}")
    else:
        typer.echo(f"KEY MISMATCH: Alice {final_a.bits}, Bob {final_b.bits}, P3 {setup.p3.bits}")
    if result.eve.combination is not None:
        typer.echo(f"Eve (both links): Result3 ^ Result4 = {result.eve.combination.bits}")


def _load_checked(path: Path):
    from goldbach_triples.comms.audit_log import AuditLog

    log = AuditLog(path)
    if not path.exists():
        raise PreconditionError("missing_log", f"audit log not found: {path}")
    return log.load(sieve_ceiling=_get_config().sieve.ceiling)


@audit_app.command("verify")
def audit_verify(path: Path = typer.Argument(..., help="Audit log file")):
    """Verify every record of an audit log."""
    with _handle_errors():
        loaded = _load_checked(path)
        for problem in loaded.problems:
            typer.echo(f"{path}:{problem.line_no}: {problem.reason}")
        if loaded.problems:
            raise AuditVerificationFailed(
                f"{len(loaded.problems)} flagged line(s), {len(loaded.records)} record(s) verified"
            )
        typer.echo(f"OK: {len(loaded.records)} record(s) verified")


@audit_app.command("show")
def audit_show(path: Path = typer.Argument(..., help="Audit log file")):
    """Show the records of an audit log."""
    with _handle_errors():
        loaded = _load_checked(path)

    table = Table(title=str(path))
    for column in ("session", "N", "P1", "P2", "P3", "width", "parties", "timestamp"):
        table.add_column(column)
    for r in loaded.records:
        table.add_row(
            f"{r.session_id:016x}", str(r.n), str(r.p1), str(r.p2), str(r.p3),
            str(r.width), ",".join(r.parties), r.timestamp.isoformat(),
        )
    console.print(table)
    for problem in loaded.problems:
        console.print(f"[red]{problem}[/]", highlight=False)


@app.command()
def version():
    """Show version information."""
    console.print(f"Goldbach Triples v{__version__}")


def main():
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
