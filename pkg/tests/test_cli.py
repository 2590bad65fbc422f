import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from extkoszul.cli import main

GOLDEN = Path(__file__).parent / "golden"

# every invocation shown in the documentation
DOCUMENTED = {
    "resolution_quotient_json": ["resolution", "--target", "quotient", "--n", "2", "--s", "2", "--format", "json"],
    "resolution_subquotient_koszul": ["resolution", "--target", "subquotient", "--n", "2", "--s", "0", "--t", "1"],
    "resolution_power_bad_bound": ["resolution", "--target", "power", "--n", "2", "--s", "1", "--bound", "0"],
    "resolution_power_verify": ["resolution", "--target", "power", "--n", "2", "--s", "1", "--bound", "3", "--verify"],
    "tor_power": ["tor", "--module", "power", "--n", "2", "--s", "1"],
    "tor_quotient": ["tor", "--module", "quotient", "--n", "2", "--s", "2"],
    "tor_graded": ["tor", "--module", "graded", "--n", "3", "--s", "0"],
    "tor_power_json": ["tor", "--module", "power", "--n", "3", "--s", "1", "--format", "json"],
    "delta_e12": ["delta", "--n", "2", "e[1,2]"],
    "delta_x10": ["delta", "--n", "2", "x[1,0]"],
    "delta_e12x1": ["delta", "--n", "3", "e[1,2]*x[1,0,0]"],
    "delta_snake": ["delta", "--n", "3", "--oracle", "snake", "e[1,2,3]*x[0,1,0]"],
    "delta_json": ["delta", "--n", "2", "--format", "json", "e[1,2]"],
    "delta_parse_error": ["delta", "--n", "2", "e[1,2"],
    "delta_inhomogeneous": ["delta", "--n", "2", "e[1]+e[1,2]"],
    "algebra_a12_a23": ["algebra", "--n", "3", "a[1,2]*a[2,3]"],
    "algebra_a12_squared": ["algebra", "--n", "2", "a[1,2]*a[1,2]"],
    "algebra_relation": ["algebra", "--n", "3", "a[2,3]*x[1,0,0] - a[1,3]*x[0,1,0] + a[1,2]*x[0,0,1]"],
    "algebra_json": ["algebra", "--n", "3", "--format", "json", "a[1,2]*a[2,3]"],
    "check_rows": ["check", "--suite", "rows", "--n", "3", "--bound", "6"],
    "check_signs": ["check", "--suite", "signs", "--n", "4", "--bound", "5"],
    "check_all": ["check", "--suite", "all", "--n", "2", "--s", "3", "--bound", "6"],
}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def render(argv, code, out, err):
    return f"$ extkoszul {' '.join(argv)}\nexit {code}\n--- stdout\n{out}--- stderr\n{err}"


@pytest.mark.parametrize("name", sorted(DOCUMENTED))
def test_golden(name):
    argv = DOCUMENTED[name]
    text = render(argv, *run(argv))
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("EXTKOSZUL_UPDATE_GOLDEN"):
        path.write_text(text)
    assert path.read_text() == text


def test_documented_results():
    assert run(DOCUMENTED["delta_e12"])[1] == "-1*e[2]*x[1,0]+1*e[1]*x[0,1]\n"
    assert run(DOCUMENTED["delta_x10"])[1] == "0\n"
    assert run(DOCUMENTED["delta_e12x1"])[1] == "-1*e[2]*x[2,0,0]+1*e[1]*x[1,1,0]\n"
    assert json.loads(run(DOCUMENTED["resolution_quotient_json"])[1])["ranks"] == [3, 6, 3]
    assert "ranks [2, 1, 0]" in run(DOCUMENTED["tor_power"])[1]
    assert "ranks [1, 3, 2]" in run(DOCUMENTED["tor_quotient"])[1]
    assert "ranks [1, 3, 3, 1]" in run(DOCUMENTED["tor_graded"])[1]
    assert run(DOCUMENTED["algebra_a12_squared"])[1].startswith("0\n")
    assert run(DOCUMENTED["algebra_relation"])[1].startswith("0\n")
    a = run(DOCUMENTED["algebra_a12_a23"])[1].splitlines()[0]
    b = run(["algebra", "--n", "3", "-1*x[0,1,0]*a[1,2,3]"])[1].splitlines()[0]
    assert a == b


@pytest.mark.parametrize(
    "argv,code",
    [
        (DOCUMENTED["resolution_power_bad_bound"], 2),
        (DOCUMENTED["delta_parse_error"], 2),
        (DOCUMENTED["delta_inhomogeneous"], 2),
        (["check", "--suite", "bogus", "--n", "2"], 2),
        (["tor", "--module", "power", "--n", "7", "--s", "1"], 2),
        (["--max-n", "8", "tor", "--module", "graded", "--n", "7", "--s", "0"], 0),
        (["resolution", "--target", "quotient", "--n", "2", "--s", "11"], 2),
        (["resolution", "--target", "subquotient", "--n", "2", "--s", "1"], 2),
        (["resolution", "--target", "quotient", "--n", "2", "--s", "2", "--mode", "formal", "--verify"], 2),
        (["algebra", "--n", "2", "a[1"], 2),
        (["delta", "--n", "2", "--oracle", "snake", "e[1,2]"], 0),
        (["resolution", "--target", "quotient", "--n", "1", "--s", "2", "--r", "3", "--verify"], 0),
        ([], 2),
    ],
)
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_verification_failure_exits_1(monkeypatch):
    import extkoszul.cli as cli

    monkeypatch.setattr(cli, "verify_exactness", lambda res, md: {"failures": [{"degree": 1}], "edge": []})
    assert run(DOCUMENTED["resolution_power_verify"])[0] == 1


def test_json_reports_carry_metadata():
    for name in ("resolution_quotient_json", "tor_power_json", "delta_json", "algebra_json"):
        data = json.loads(run(DOCUMENTED[name])[1])
        for key in ("schema", "n", "s", "mode", "bound"):
            assert key in data, (name, key)
    data = json.loads(run(["check", "--suite", "rows", "--n", "1", "--bound", "2", "--format", "json"])[1])
    assert data["ok"] and data["schema"] == "extkoszul.check/1"


def test_console_output_is_byte_identical():
    argv = [sys.executable, "-m", "extkoszul", "tor", "--module", "quotient", "--n", "3", "--s", "2", "--format", "json"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
