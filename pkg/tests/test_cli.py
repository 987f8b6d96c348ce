import csv
import io
import json
import subprocess
import sys

import pytest

from hlrr.cli import run_cli
from hlrr.identities import CATALOGUE, VerificationReport, side_series
from hlrr.qseries import from_grid, to_grid


def run(*argv):
    out = io.StringIO()
    code = run_cli(list(argv), out)
    return code, out.getvalue()


def test_list_json_covers_catalogue():
    code, text = run("list", "--format", "json")
    assert code == 0
    rows = json.loads(text)
    assert [r["id"] for r in rows] == list(CATALOGUE)
    ag = next(r for r in rows if r["id"] == "ag")
    assert set(ag["params"]) == {"m", "i"}


def test_list_text_and_csv():
    assert run("list")[0] == 0
    code, text = run("list", "--format", "csv")
    assert code == 0
    assert next(csv.reader(io.StringIO(text))) == ["id", "params", "forms", "description"]


def test_verify_json_fields():
    code, text = run("verify", "--id", "rr", "--param", "sigma=0", "--order", "200", "--format", "json")
    assert code == 0
    d = json.loads(text)
    assert list(d) == list(VerificationReport.FIELDS)
    assert d["match"] is True and d["order_q"] == 200


def test_verify_no_timings_is_byte_stable():
    argv = ("verify", "--id", "cn", "--param", "m=1", "--param", "n=2", "--order", "30", "--format", "json", "--no-timings")
    assert run(*argv) == run(*argv)


def test_verify_perturb_exits_one():
    code, text = run("verify", "--id", "cn", "--param", "m=1", "--param", "n=1", "--perturb", "1", "--format", "json")
    assert code == 1
    assert json.loads(text)["first_mismatch_q"] is not None


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--id", "dn", "--param", "m=1", "--param", "n=1"),
        ("verify", "--id", "nope"),
        ("verify", "--id", "rr"),
        ("verify", "--id", "rr", "--param", "sigma"),
        ("verify", "--id", "rr", "--param", "sigma=0", "--order", "1/3"),
        ("verify", "--id", "rr", "--param", "sigma=0", "--order", "0"),
        ("dump", "--id", "cn", "--param", "m=1", "--param", "n=1", "--side", "nope"),
        ("suite", "--file", "/nonexistent/suite.txt"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_csv_verify_has_header():
    code, text = run("verify", "--id", "ag", "--param", "m=1", "--param", "i=2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0 and rows[0][0] == "id" and rows[1][0] == "ag"


@pytest.mark.parametrize("rid,params,order", [("ag", ["m=2", "i=1"], "15"), ("triple", [], "11/2")])
def test_dump_csv_round_trips(rid, params, order):
    argv = ["dump", "--id", rid, "--order", order, "--format", "csv"]
    for p in params:
        argv += ["--param", p]
    code, text = run(*argv)
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["exponent", "coefficient"]
    parsed = {to_grid(e): int(c) for e, c in rows[1:]}
    series = side_series(rid, dict(p.split("=") for p in params), order)
    for s, c in parsed.items():
        assert series.coeff(from_grid(s)) == c
    assert max(parsed) == to_grid(order)


def test_dump_named_form():
    code, text = run("dump", "--id", "cn", "--param", "m=1", "--param", "n=2", "--side", "cn-m", "--order", "5", "--format", "json")
    assert code == 0
    assert json.loads(text)[0] == [0, 1]


def test_suite_file(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("rr sigma=0 order=20\ndn m=1 n=1\nag m=1 i=1 order=20\n")
    code, text = run("suite", "--file", str(suite), "--format", "json", "--jobs", "2")
    reports = json.loads(text)
    assert code == 1
    assert [r["id"] for r in reports] == ["rr", "dn", "ag"]
    assert "error" in reports[1]["notes"]


def test_suite_all_errors_exit_two(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("dn m=1 n=1\n")
    assert run("suite", "--file", str(suite))[0] == 2


def test_suite_all_match_exit_zero(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("rr sigma=1 order=20\n")
    assert run("suite", "--file", str(suite), "--format", "csv")[0] == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hlrr", "verify", "--id", "rr", "--param", "sigma=1", "--order", "30"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("MATCH")
