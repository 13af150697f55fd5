import csv
import io
import math

import pytest

import cli
from utils.state_io import read_state


@pytest.fixture(autouse=True)
def log_to_tmp(tmp_path, monkeypatch) -> None:
    monkeypatch.setenv("ROTOR_LOG_FILE", str(tmp_path / "cli.log"))


def run(*argv: str):
    out = io.StringIO()
    code = cli.run(list(argv), out=out)
    return code, out.getvalue()


def rows(text: str):
    return list(csv.DictReader(io.StringIO(text)))


def test_expect_prints_closed_report() -> None:
    code, text = run("expect", "--family", "1", "--z", "1")
    assert code == cli.EXIT_OK
    (row,) = rows(text)
    assert row["source"] == "closed"
    assert math.isclose(float(row["J0"]), -0.5, abs_tol=1e-9)
    assert math.isclose(float(row["Jsq"]), 1.0, rel_tol=1e-9)


def test_expect_with_direct_oracle() -> None:
    code, text = run("expect", "--family", "5", "--z", "1.2", "--zl", "0.3-0.2i", "--direct")
    assert code == cli.EXIT_OK
    closed, direct = rows(text)
    assert direct["source"] == "direct"
    assert math.isclose(float(closed["Jsq"]), float(direct["Jsq"]), rel_tol=1e-8)


def test_domain_error_exit_code() -> None:
    code, _ = run("expect", "--family", "3", "--z", "1.5")
    assert code == cli.EXIT_DOMAIN


@pytest.mark.parametrize("argv", [
    ["expect"],
    ["expect", "--family", "9", "--z", "1"],
    ["verify", "spectra"],
    ["evolve", "--family", "1", "--z", "1"],
])
def test_usage_errors(argv) -> None:
    code, _ = run(*argv)
    assert code == cli.EXIT_USAGE


def test_help_exits_cleanly() -> None:
    code, _ = run("--help")
    assert code == cli.EXIT_OK


def test_half_step_jmax_is_checked() -> None:
    code, _ = run("mcs", "--family", "1", "--z", "0.5", "--jmax", "0.3")
    assert code == cli.EXIT_DOMAIN


def test_families_table() -> None:
    code, text = run("families", "table")
    assert code == cli.EXIT_OK
    assert [row["family"] for row in rows(text)] == [str(n) for n in range(1, 9)]


def test_family_coefficients_follow_tower() -> None:
    code, text = run("families", "coefficients", "--family", "5", "--jmax", "2")
    assert code == cli.EXIT_OK
    assert [row["two_j"] for row in rows(text)] == ["0", "2", "4"]


def test_family_norm() -> None:
    code, text = run("families", "norm", "--family", "1", "--z", "2")
    assert code == cli.EXIT_OK
    (row,) = rows(text)
    assert math.isclose(float(row["N"]), math.exp(2.0), rel_tol=1e-10)
    assert math.isclose(float(row["N_closed"]), math.exp(2.0), rel_tol=1e-10)


def test_mcs_to_file(tmp_path) -> None:
    target = tmp_path / "state.txt"
    code, text = run("mcs", "--family", "2", "--z", "0.4", "--zm", "0.1i", "--jmax", "1.5",
                     "--output", str(target))
    assert code == cli.EXIT_OK
    assert text == ""
    state = read_state(target)
    assert state.space.two_j_max == 3


def test_mcs_printed_amplitudes() -> None:
    code, text = run("mcs", "--family", "5", "--z", "0.5", "--jmax", "1")
    assert code == cli.EXIT_OK
    printed = rows(text)
    assert ("0", "0", "0") in {(row["two_j"], row["two_k"], row["two_m"]) for row in printed}
    assert {row["two_j"] for row in printed} == {"0", "2"}


def test_text_format() -> None:
    code, text = run("--format", "text", "families", "table")
    assert code == cli.EXIT_OK
    assert "," not in text.splitlines()[0]


def test_tables_reproduce_norms() -> None:
    code, text = run("tables", "reproduce", "--which", "norms")
    assert code == cli.EXIT_OK
    assert len(rows(text)) == 160


def test_verify_algebra() -> None:
    code, text = run("verify", "algebra", "--jmax", "1.5")
    assert code == cli.EXIT_OK
    assert all(row["passed"] == "true" for row in rows(text))


def test_evolve_with_drive_file(tmp_path) -> None:
    drive = tmp_path / "drive.txt"
    drive.write_text("aL0 = 1.0\n")
    code, text = run("evolve", "--family", "5", "--z", "1", "--drive", str(drive), "--t-end", "0.2",
                     "--dt", "0.1")
    assert code == cli.EXIT_OK
    assert len(rows(text)) == 3


def test_evolve_missing_drive_file(tmp_path) -> None:
    code, _ = run("evolve", "--family", "5", "--z", "1", "--drive", str(tmp_path / "absent.txt"))
    assert code == cli.EXIT_DOMAIN


def test_rotor_demo() -> None:
    code, text = run("evolve", "--family", "5", "--z", "1", "--zl", "0.2", "--rotor", "1,1,1", "--jmax", "2",
                     "--t-end", "1")
    assert code == cli.EXIT_OK
    samples = rows(text)
    assert len(samples) == 4
    assert "JM_x" in samples[0]
