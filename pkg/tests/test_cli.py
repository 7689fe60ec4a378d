import csv
import re

import pytest
from typer.testing import CliRunner

from goldbach_triples import __version__
from goldbach_triples.cli import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("GOLDBACH_CONFIG", raising=False)
    monkeypatch.delenv("GOLDBACH_LOG_LEVEL", raising=False)
    return tmp_path


def rows(output, columns):
    pattern = re.compile(r"^" + r"\t".join([r"-?\d+"] * columns) + r"$")
    return [tuple(int(x) for x in line.split("\t")) for line in output.splitlines() if pattern.match(line)]


def run_demo(*args):
    return runner.invoke(
        app,
        ["demo", "--n", "181", "--triple", "31,67,83", "--hash-a", "47", "--hash-b", "99", "--width", "7", *args],
    )


def test_count():
    result = runner.invoke(app, ["count", "9..13"])
    assert result.exit_code == 0
    assert rows(result.output, 2) == [(9, 2), (11, 2), (13, 2)]


def test_count_triangular():
    result = runner.invoke(app, ["count", "--triangular", "971..975"])
    assert rows(result.output, 2) == [(971, 232), (973, 210), (975, 158)]


def test_even_bounds_snap_inward():
    result = runner.invoke(app, ["count", "8..14"])
    assert result.exit_code == 0
    assert [n for n, _ in rows(result.output, 2)] == [9, 11, 13]


def test_enumerate():
    result = runner.invoke(app, ["enumerate", "21"])
    assert rows(result.output, 4) == [
        (21, 2, 2, 17), (21, 3, 5, 13), (21, 3, 7, 11), (21, 5, 5, 11), (21, 7, 7, 7),
    ]


def test_enumerate_triangular():
    result = runner.invoke(app, ["enumerate", "--triangular", "49"])
    assert len(rows(result.output, 4)) == 5


@pytest.mark.parametrize("args", [["enumerate", "10"], ["count", "a..b"], ["count", "3"]])
def test_errors_exit_one(args):
    result = runner.invoke(app, args)
    assert result.exit_code == 1
    assert "error: PreconditionError" in result.output


def test_seq_csv(isolated):
    out = isolated / "out" / "seq.csv"
    result = runner.invoke(app, ["seq", "9..25", "--csv", str(out)])
    assert result.exit_code == 0
    with open(out, newline="") as f:
        table = list(csv.DictReader(f))
    assert list(table[0]) == ["n", "g", "t", "parity_g", "parity_t"]
    assert [int(r["parity_t"]) for r in table] == [1, 1, 1, -1, -1, 1, 1, 1, -1]
    assert table[0] == {"n": "9", "g": "2", "t": "1", "parity_g": "-1", "parity_t": "1"}


def test_seq_autocorrelation(isolated):
    out = isolated / "ac.csv"
    result = runner.invoke(app, ["seq", "9..41", "--which", "t", "--autocorr", "--csv", str(out)])
    assert result.exit_code == 0
    with open(out, newline="") as f:
        table = list(csv.DictReader(f))
    assert len(table) == 17
    assert float(table[0]["c_k"]) == 1.0
    c = [float(r["c_k"]) for r in table]
    assert all(c[k] == pytest.approx(c[17 - k], abs=1e-12) for k in range(1, 17))
    assert "max off-peak |c_k|" in result.output


def test_analyze():
    result = runner.invoke(app, ["analyze", "165..195"])
    assert result.exit_code == 0
    minima = re.search(r"local minima: (.*)", result.output).group(1).split()
    assert {"171", "177", "183", "189"} <= set(minima)
    assert "band inequalities hold" in result.output


def test_demo_worked_example():
    result = run_demo()
    assert result.exit_code == 0, result.output
    for expected in (
        "0110000 -> Result1",
        "0100000 -> Result2",
        "1001100 -> Result3",
        "0010000 -> Result4",
        "1111100 -> Result5",
        "0110000 -> Result6",
        "1010011 -> Final Key",
        "Keys match: 1010011 = P3 = 83",
        "Result3 ^ Result4 = 1011100",
    ):
        assert expected in result.output
    assert result.output.count("1010011 -> Final Key") == 2


def test_demo_tamper():
    result = run_demo("--tamper", "2a:bit3")
    assert result.exit_code == 0
    assert "KEY MISMATCH" in result.output


def test_demo_from_range():
    result = runner.invoke(app, ["demo", "--seed", "1", "--range", "101..999"])
    assert result.exit_code == 0, result.output
    assert "Keys match" in result.output


def test_demo_tamper_on_random_session():
    result = runner.invoke(app, ["demo", "--tamper", "2a:bit3"])
    assert result.exit_code == 0, result.output
    assert "KEY MISMATCH" in result.output


def test_demo_without_tap():
    result = run_demo("--tap", "none")
    assert "Result3 ^ Result4" not in result.output


def test_demo_from_config_range():
    result = runner.invoke(app, ["demo", "--seed", "3"])
    assert result.exit_code == 0, result.output
    assert "Keys match" in result.output


def test_demo_rejects_half_injected_hashes():
    result = runner.invoke(app, ["demo", "--n", "181", "--hash-a", "47"])
    assert result.exit_code == 1
    assert "error: PreconditionError" in result.output


def test_demo_rejects_foreign_triple():
    result = runner.invoke(app, ["demo", "--n", "181", "--triple", "31,67,85"])
    assert result.exit_code == 1
    assert "error: SessionError" in result.output


def test_audit_round_trip(isolated):
    log = isolated / "audit.log"
    assert run_demo("--audit-log", str(log)).exit_code == 0
    assert runner.invoke(app, ["demo", "--seed", "9", "--audit-log", str(log)]).exit_code == 0

    verified = runner.invoke(app, ["audit", "verify", str(log)])
    assert verified.exit_code == 0
    assert "OK: 2 record(s) verified" in verified.output

    shown = runner.invoke(app, ["audit", "show", str(log)])
    assert shown.exit_code == 0
    assert "181" in shown.output

    lines = log.read_text().splitlines()
    lines[0] = lines[0].replace("p3=83", "p3=84")
    log.write_text("\n".join(lines) + "\n")
    failed = runner.invoke(app, ["audit", "verify", str(log)])
    assert failed.exit_code == 1
    assert ":1: corrupt" in failed.output
    assert "error: AuditVerificationFailed" in failed.output


def test_audit_verify_missing_file(isolated):
    result = runner.invoke(app, ["audit", "verify", str(isolated / "none.log")])
    assert result.exit_code == 1


def test_init_writes_config_once(isolated):
    first = runner.invoke(app, ["init"])
    assert first.exit_code == 0
    assert (isolated / "goldbach.yaml").exists()
    assert runner.invoke(app, ["init"]).exit_code == 1


def test_config_file_is_used(isolated):
    (isolated / "goldbach.yaml").write_text(
        "parties:\n  - id: carol\n    key: c\n  - id: dave\n    key: d\n"
    )
    result = runner.invoke(app, ["demo", "--n", "99", "--audit-log", str(isolated / "a.log")])
    assert result.exit_code == 0
    assert "parties=carol,dave" in (isolated / "a.log").read_text()


def test_missing_explicit_config(isolated):
    result = runner.invoke(app, ["--config", str(isolated / "nope.yaml"), "count", "9"])
    assert result.exit_code == 1


def test_version():
    result = runner.invoke(app, ["version"])
    assert __version__ in result.output


def test_audit_verify_flags_absurd_share(isolated):
    log = isolated / "audit.log"
    assert run_demo("--audit-log", str(log)).exit_code == 0
    good = log.read_text().strip()
    bad = good.replace("n=181", "n=83000000000181").replace("p3=83", "p3=83000000000083")
    log.write_text(f"{good}\n{bad}\n")

    result = runner.invoke(app, ["audit", "verify", str(log)])
    assert result.exit_code == 1
    assert ":2: corrupt" in result.output
    assert "outside prime table range" in result.output
    assert "error: AuditVerificationFailed: 1 flagged line(s), 1 record(s) verified" in result.output


@pytest.mark.parametrize("value", ["-1", str(2**256)])
def test_demo_rejects_unrepresentable_hash(value):
    result = runner.invoke(app, ["demo", "--n", "181", "--hash-a", value, "--hash-b", "99"])
    assert result.exit_code == 1
    assert "error: PreconditionError: bad_hashes" in result.output


@pytest.mark.parametrize("args", [["count", "20000001"], ["enumerate", "20000001"]])
def test_sieve_ceiling_is_enforced(args):
    result = runner.invoke(app, args)
    assert result.exit_code == 1
    assert "error: PreconditionError: sieve_ceiling" in result.output


def test_demo_nonce_tamper_aborts():
    result = run_demo("--nonce", "--tamper", "2b:nonce")
    assert result.exit_code == 1
    assert "error: NonceMismatchError" in result.output


def test_count_single_large_n():
    result = runner.invoke(app, ["count", "59999"])
    assert result.exit_code == 0
    assert rows(result.output, 2) == [(59999, 822436)]
