import csv
import io
import json
import math
import subprocess
import sys

import pytest

from dilation_lab.cli import main, parse_grid


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_profile_rows_match_closed_form(capsys):
    status, out = run(capsys, "profile", "0", "inf", "inf", "--grid", "0.1:0.9:9")
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    for row in rows:
        t = float(row["theta"])
        assert float(row["value"]) == pytest.approx(-(1 - t) * math.log(1 - t), abs=1e-8)
        assert float(row["general"]) == pytest.approx(float(row["value"]), abs=1e-6)
        assert row["method"] == "cdd-case"


def test_profile_json_format(capsys):
    status, out = run(capsys, "profile", "0", "2", "inf", "--grid", "0.5", "--format", "json")
    assert status == 0
    (row,) = json.loads(out)
    assert row["value"] == pytest.approx(2 * (math.sqrt(0.5) - 0.5), abs=1e-8)


def test_dilate_reports_both_measures(capsys):
    status, out = run(capsys, "dilate", "exponential", "[[0, 0.693147]]", "0.5")
    assert status == 0
    data = json.loads(out)
    assert data["measure"] == pytest.approx(0.5, abs=1e-6)
    assert data["dilated_measure"] == pytest.approx(0.75, abs=1e-6)
    (lo, hi), = data["dilated"]
    assert lo == pytest.approx(-0.693147, abs=1e-6) and hi == pytest.approx(1.386294, abs=1e-6)


def test_dilate_accepts_infinite_ends(capsys):
    status, out = run(capsys, "dilate", "gaussian:1", "[[-inf, 0]]", "0.3")
    assert status == 0
    # a half-line swallows the whole line: long intervals reaching into it are almost full
    data = json.loads(out)
    assert data["dilated"] == [["-inf", "inf"]] and data["dilated_measure"] == 1


def test_bound_value_and_out_of_domain(capsys):
    status, out = run(capsys, "bound", "0", "inf", "inf", "0.5", "0.5")
    assert status == 0 and json.loads(out)["value"] == pytest.approx(0.75, abs=1e-8)
    status, out = run(capsys, "bound", "0", "2", "inf", "0.9", "0.5")
    assert status == 1 and json.loads(out)["error"] == "OutOfDomain"


def test_excluded_triple_exits_one(capsys):
    status, out = run(capsys, "profile", "-1", "2", "inf", "--grid", "0.5")
    assert status == 1 and json.loads(out)["error"] == "ExcludedTriple"


@pytest.mark.parametrize("argv", [
    ["bound", "0", "2", "x", "0.5", "0.5"],
    ["flat", "nosuch", "[0, 1]"],
    ["dilate", "exponential", "not json", "0.5"],
    ["profile", "0", "2", "inf", "--grid", "0:1"],
    ["remez", "exponential", "x", "--s-grid", "0.5"],
])
def test_usage_errors_exit_two(capsys, argv):
    status, out = run(capsys, *argv)
    assert status == 2 and json.loads(out)["error"] == "UsageError"


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2


def test_flat_and_remez_commands(capsys):
    status, out = run(capsys, "flat", "exponential", "[0, inf]", "--grid", "0.5")
    assert status == 0 and float(out.splitlines()[1].split(",")[1]) == pytest.approx(0.34657359, abs=1e-8)
    status, out = run(capsys, "remez", "exponential", "x", "--s-grid", "1,2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["value"]) for r in rows] == [pytest.approx(1), pytest.approx(2)]


def test_entropy_command(capsys):
    status, out = run(capsys, "entropy", "exponential", "x", "inf")
    data = json.loads(out)
    assert status == 0 and data["pass"] and data["entropy"] == pytest.approx(0.422784335, abs=1e-8)


def test_verify_suite(capsys):
    status, out = run(capsys, "verify", "closed-forms")
    data = json.loads(out)
    assert status == 0 and data["pass"] and data["suite"] == "closed-forms"


def test_output_file_and_repeatable_bytes(tmp_path, capsys):
    path = tmp_path / "p.csv"
    assert main(["--output", str(path), "profile", "1", "inf", "inf", "--grid", "0.2,0.7"]) == 0
    first = path.read_bytes()
    assert main(["--output", str(path), "profile", "1", "inf", "inf", "--grid", "0.2,0.7"]) == 0
    assert path.read_bytes() == first and capsys.readouterr().out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dilation_lab", "bound", "0", "inf", "inf", "0.5", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == pytest.approx(0.75, abs=1e-8)


def test_grid_parsing():
    assert parse_grid("0:1:3").tolist() == [0, 0.5, 1]
    assert parse_grid("0.1, 0.2").tolist() == [0.1, 0.2]
