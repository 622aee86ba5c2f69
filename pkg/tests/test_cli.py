"""End-to-end CLI runs: formats, output files, determinism, exit codes."""

import csv
import io

import numpy as np
import pytest

from eprgeo.cli import main
from eprgeo.report import CSV_COLUMNS

FLAT = """\
[spacetime]
kind = minkowski

[decay]
event = 0, 0, 0, 0

[detector1]
tangent = 1.25, 0.75, 0, 0
tau = 1.5

[detector2]
tangent = 1.25, -0.75, 0, 0
tau = 1.5

[measurements]
directions1 = 0,0,1
directions2 = 0,0,1 ; 1,0,0
"""


@pytest.fixture
def flat_scenario(tmp_path):
    p = tmp_path / "flat.cfg"
    p.write_text(FLAT)
    return p


def test_table_to_stdout(flat_scenario, capsys):
    assert main(["run", str(flat_scenario)]) == 0
    out = capsys.readouterr().out
    assert "E_matched" in out
    assert "chsh_matched" in out
    assert "scenario" in out


def test_csv_format_flag(flat_scenario, capsys):
    assert main(["run", str(flat_scenario), "--format", "csv"]) == 0
    out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    by_quantity = {r[1]: r for r in rows[1:]}
    assert by_quantity["tool_version"][4] == "0.1.0"
    assert len(by_quantity["scenario_sha256"][4]) == 64
    assert float(by_quantity["E_matched"][4]) == pytest.approx(-1.0, abs=1e-12)
    assert by_quantity["E_matched"][5] == "ok"


def test_out_file_and_byte_identical_reruns(flat_scenario, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["run", str(flat_scenario), "--format", "csv", "--out", str(a)]) == 0
    assert main(["run", str(flat_scenario), "--format", "csv", "--out", str(b)]) == 0
    blob = a.read_bytes()
    assert blob == b.read_bytes()
    # RFC 4180 line endings, unmangled by the file writer
    assert blob.count(b"\r\n") == blob.count(b"\n")


def test_scenario_output_section_is_honored(tmp_path, capsys):
    out_file = tmp_path / "report.csv"
    text = FLAT + f"\n[output]\nformat = csv\npath = {out_file}\n"
    p = tmp_path / "with_output.cfg"
    p.write_text(text)
    assert main(["run", str(p)]) == 0
    assert capsys.readouterr().out == ""
    with open(out_file, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS


def test_format_flag_overrides_scenario(tmp_path, capsys):
    p = tmp_path / "csvfmt.cfg"
    p.write_text(FLAT + "\n[output]\nformat = csv\n")
    assert main(["run", str(p), "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert "," not in out.splitlines()[0]
    assert "quantity" in out


def test_missing_file_exits_1(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 1
    assert "cannot read scenario" in capsys.readouterr().err


def test_invalid_scenario_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text(FLAT.replace("kind = minkowski", "kind = kerr"))
    assert main(["run", str(p)]) == 1
    err = capsys.readouterr().err
    assert "error" in err and "line 2" in err


def test_numerical_failure_exits_2(tmp_path, capsys):
    p = tmp_path / "fail.cfg"
    p.write_text(
        FLAT.replace(
            "[detector2]\ntangent = 1.25, -0.75, 0, 0\ntau = 1.5",
            "[detector2]\ntarget = 0.5, 3.0, 0, 0",  # spacelike separation
        )
    )
    assert main(["run", str(p), "--format", "csv"]) == 2
    out = capsys.readouterr().out
    assert "no timelike geodesic" in out


def test_strict_diagnostics_exit_3(tmp_path, capsys):
    # a very coarse sample step degrades the route-agreement diagnostic
    # without failing the run outright
    text = """\
[spacetime]
kind = schwarzschild
mass = 1.0

[decay]
event = 0, 8, 1.5707963267948966, 0

[detector1]
tangent = 1.285, 0.7, 0, 0.05
tau = 2.5

[detector2]
tangent = 1.304, -0.6, 0.05, -0.04
tau = 2.5

[numerics]
sample_step = 0.8
"""
    p = tmp_path / "coarse.cfg"
    p.write_text(text)
    assert main(["run", str(p), "--strict"]) == 3
    capsys.readouterr()
    assert main(["run", str(p)]) == 0


def test_table_values_match_csv_values(flat_scenario, capsys):
    assert main(["run", str(flat_scenario), "--format", "csv"]) == 0
    csv_out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(csv_out)))
    e_csv = next(float(r[4]) for r in rows[1:] if r[1] == "E" and r[2] == "0" and r[3] == "1")
    # second detector direction is x while the first measures z: uncorrelated
    assert e_csv == pytest.approx(0.0, abs=1e-12)
    assert np.isfinite(e_csv)
