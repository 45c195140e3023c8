import json
import math
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatform.cli import parse_limit_expr, run
from quatform.errors import ArgumentError

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())

JSON_CASES = [
    ["theta", "--family-p", "5", "--n-max", "10"],
    ["eisenstein", "--family-p", "13", "--n-max", "20", "--dual"],
    ["local-density", "--family-p", "13", "--q", "3", "--n", "6"],
    ["local-density", "--family-p", "13", "--q", "3", "--n", "6", "--v", "2", "--mode", "direct"],
    ["siegel-check", "--family-p", "13", "--n", "1", "2", "--cutoff", "100"],
    ["bounds", "--family-p", "101", "--x-max", "200"],
    ["petersson", "--family-p", "101"],
    ["threshold", "--family-p", "101", "--spot", "50"],
    ["exceptions", "--family-p", "229", "--n-max", "300"],
    ["family-verify", "--p", "229", "--n-max", "1000"],
    ["max-tau", "--x", "48"],
    ["psi-table", "--points", "20"],
    ["theta", "--gram", "[2,1,1,1,1,2,1,1,1,1,2,1,1,1,1,4]", "--n-max", "5"],
    ["theta", "--gram-csv", "2,1,1,1,2,1,1,2,1,4", "--n-max", "5"],
]


def invoke(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv", JSON_CASES, ids=lambda a: " ".join(a[:2]))
def test_json_schema_and_determinism(argv, capsys):
    code, first, _ = invoke(argv + ["--format", "json"], capsys)
    assert code == 0
    doc = json.loads(first)
    jsonschema.validate(doc, SCHEMA)
    assert doc["ok"] is True
    _, second, _ = invoke(argv + ["--format", "json"], capsys)
    assert first == second


def test_family_verify_example(capsys):
    code, out, _ = invoke(["family-verify", "--p", "229", "--n-max", "1000", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["computed"] == doc["result"]["predicted"] == [14]


def test_max_tau_example(capsys):
    code, out, _ = invoke(["max-tau", "--limit-expr", "25.09*101^(35/6)"], capsys)
    assert code == 0
    assert "10752" in out and "9316358251200" in out


def test_theta_example(capsys):
    code, out, _ = invoke(["theta", "--family-p", "5", "--n-max", "10", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("n,r")
    assert lines[1].split(",")[:2] == ["0", "1"]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    assert run(["max-tau", "--x", "60", "--format", "json", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["result"]["M"] == 12


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 2),
        (["theta", "--n-max", "5"], 2),
        (["theta", "--family-p", "5", "--gram-csv", "2,1,1,1,2,1,1,2,1,4"], 2),
        (["theta", "--family-p", "17"], 2),
        (["theta", "--gram", "[[2,1],[1,2]]"], 2),
        (["theta", "--gram", "not json"], 2),
        (["theta", "--family-p", "5", "--threads", "0"], 2),
        (["petersson", "--family-p", "101", "--n-trunc", "10"], 2),
        (["max-tau", "--limit-expr", "2^(1/2)+1"], 2),
        (["bounds", "--family-p", "13"], 3),
        (["threshold", "--family-p", "53"], 3),
        (["siegel-check", "--family-p", "13", "--n", "1", "--cutoff", "50", "--tol", "1e-12"], 4),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code
    capsys.readouterr()


def test_force_lifts_hypothesis(capsys):
    assert run(["petersson", "--family-p", "53", "--force"]) == 0
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "quatform", "max-tau", "--x", "48", "--format", "csv"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.splitlines()[2] == "M,10"


def test_limit_expr_examples():
    assert parse_limit_expr("25.09*101^(35/6)") == 12341710124277
    assert parse_limit_expr("(3 + 4) * 2 - 1") == 13
    assert parse_limit_expr("7/2") == 3
    assert parse_limit_expr("2^-1 * 9") == 4
    assert parse_limit_expr("4^(1/2)") == 2
    for bad in ("import os", "x + 1", "2 ** (1/2) + 1", "1/0", "(-4)^(1/2)"):
        with pytest.raises(ArgumentError):
            parse_limit_expr(bad)


@given(
    st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=50),
    st.integers(2, 400),
    st.fractions(min_value=0, max_value=6, max_denominator=7),
)
def test_limit_expr_floor_is_exact(c, b, e):
    text = f"({c.numerator}/{c.denominator})*{b}^({e.numerator}/{e.denominator})"
    f = parse_limit_expr(text)
    num, den = e.numerator, e.denominator
    assert (Fraction(f) / c) ** den <= Fraction(b) ** num < (Fraction(f + 1) / c) ** den
    assert abs(f - c * b ** float(e)) <= 1 + 1e-9 * f


@given(st.integers(-10**6, 10**6), st.integers(1, 1000), st.integers(-50, 50))
def test_limit_expr_rational_arithmetic(a, b, k):
    assert parse_limit_expr(f"{a}/{b} + {k}") == math.floor(Fraction(a, b) + k)
