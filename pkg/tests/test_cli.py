import csv
import io
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from reflectode.cli import exit_code_for, main
from reflectode.errors import ConvergenceError, SingularPathError, UnsolvableBVPError
from reflectode.expression import EvaluationError, ExpressionSyntaxError
from reflectode.problem import dump, load, with_mode
from reflectode.varpar import vp_solve

DATA = Path(__file__).parent / "data"


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, np.array([[float(x) for x in row] for row in reader])


# ---------------------------------------------------------------- solvers


def test_solve_bvp_periodic_scalar(capsys):
    code, out, err = run_cli(capsys, "solve-bvp", "--input", DATA / "periodic_scalar.ini")
    assert code == 0, err
    header, table = rows(out)
    assert header == ["t", "u"]
    assert table.shape == (201, 2)
    assert table[0, 0] == -1.0 and table[-1, 0] == 1.0
    assert abs(table[0, 1] - table[-1, 1]) <= 1e-7
    assert np.allclose(table[:, 1], 1.0, atol=1e-9)


def test_solve_ivp_system_uses_output_section(capsys):
    code, out, _ = run_cli(capsys, "solve-ivp", "-i", DATA / "swap_system.ini")
    assert code == 0
    header, table = rows(out)
    assert header == ["t", "u1", "u2"]
    assert table.shape == (9, 3)
    spec = load(DATA / "swap_system.ini")
    sys_ = spec.system()
    for t, *u in table[::4]:
        assert np.allclose(u, vp_solve(sys_, spec.forcing(), np.zeros(2), t), atol=1e-9)


def test_flags_override_grid(capsys):
    code, out, _ = run_cli(
        capsys, "solve-ivp", "-i", DATA / "swap_system.ini", "--t-min", "0", "--t-max", "0.5", "--points", "3"
    )
    assert code == 0
    _, table = rows(out)
    assert table[:, 0].tolist() == [0.0, 0.25, 0.5]


def test_green_bvp_grid(capsys):
    code, out, _ = run_cli(capsys, "green-bvp", "-i", DATA / "swap_system.ini", "--points", "3", "--grid-s", "5")
    assert code == 0
    header, table = rows(out)
    assert header == ["t", "s", "G11", "G12", "G21", "G22"]
    assert table.shape == (15, 6)


def test_green_bvp_scalar_golden(capsys):
    code, out, _ = run_cli(
        capsys, "green-bvp", "-i", DATA / "periodic_scalar.ini",
        "--t-min", "0.5", "--t-max", "0.5", "--points", "1", "--grid-s", "9",
    )
    assert code == 0
    header, table = rows(out)
    assert header == ["t", "s", "G"]
    row = table[np.isclose(table[:, 1], 0.25)][0]
    assert row[2] == pytest.approx((math.cos(0.25) + math.sin(0.75)) / (2 * math.sin(1.0)), abs=1e-12)


def test_green_ivp(capsys):
    code, out, _ = run_cli(capsys, "green-ivp", "-i", DATA / "periodic_scalar.ini", "--points", "2", "--grid-s", "3")
    assert code == 0
    header, table = rows(out)
    assert header == ["t", "s", "G"] and table.shape == (6, 3)


def test_output_file_and_determinism(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["solve-bvp", "-i", str(DATA / "swap_system.ini"), "-o", str(p)]) == 0
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert b"\r" not in a
    # 17 significant digits round-trip exactly
    for line in a.decode().splitlines()[1:]:
        for field in line.split(","):
            assert float(format(float(field), ".17g")) == float(field)


# ---------------------------------------------------------------- operator modes


def test_basis_from_equation(capsys):
    code, out, _ = run_cli(capsys, "basis", "--equation", "x' + 2 x(-t) = 0")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "operator: phi*[2] + [D]"
    assert len(lines) == 2
    assert "cos(2*t)" in lines[1] and "sin(2*t)" in lines[1]


def test_basis_from_file(capsys):
    code, out, _ = run_cli(capsys, "basis", "-i", DATA / "periodic_scalar.ini")
    assert code == 0
    assert "cos(t)" in out and "sin(t)" in out


def test_reduce(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--equation", "x' + 2 x(-t)")
    assert code == 0
    assert "L1 L = D^2 + 4" in out
    assert "R = 1" in out
    assert out.strip().endswith("2,1")


# ---------------------------------------------------------------- verify


def test_verify_bvp(capsys):
    code, out, _ = run_cli(capsys, "verify", "-i", DATA / "swap_system.ini")
    assert code == 0
    values = dict(line.split(",") for line in out.strip().splitlines())
    assert float(values["max_residual"]) <= 1e-6
    assert float(values["max_oracle_deviation"]) <= 1e-6


def test_verify_ivp(capsys, tmp_path):
    path = tmp_path / "ivp.ini"
    dump(with_mode(load(DATA / "swap_system.ini"), "ivp"), path)
    code, out, _ = run_cli(capsys, "verify", "-i", path, "--points", "5")
    assert code == 0
    values = dict(line.split(",") for line in out.strip().splitlines())
    assert float(values["max_residual"]) <= 1e-6
    assert float(values["max_oracle_deviation"]) <= 1e-6


# ---------------------------------------------------------------- exit codes


@pytest.mark.parametrize(
    "argv",
    [
        ["solve-ivp"],
        ["solve-ivp", "-i", "missing.ini"],
        ["basis", "--equation", "x + y"],
        ["solve-ivp", "-i", str(DATA / "swap_system.ini"), "--points", "0"],
        ["solve-bvp", "-i", str(DATA / "singular_path.ini")],
        ["no-such-command"],
        ["solve-ivp", "--points", "many"],
        ["basis", "--equation", "x'' + x'"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "error" in err or "usage" in err


def test_malformed_file(capsys, tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[system]\nn = 1\nF = 1\nG = 0\nA = 0\nB = 1 2\n")
    code, _, err = run_cli(capsys, "solve-ivp", "-i", path)
    assert code == 2
    assert err.startswith("error[usage]:")


def test_unsolvable(capsys):
    code, out, err = run_cli(capsys, "solve-bvp", "-i", DATA / "unsolvable.ini")
    assert code == 3
    assert err.startswith("error[unsolvable]:")
    assert out == ""


def test_singular_path(capsys):
    code, _, err = run_cli(capsys, "solve-ivp", "-i", DATA / "singular_path.ini")
    assert code == 4
    assert err.startswith("error[singular-path]:")


def test_numerical_failure(capsys):
    code, _, err = run_cli(capsys, "solve-ivp", "-i", DATA / "division_by_zero.ini")
    assert code == 5
    assert err.startswith("error[numerical]:")


def test_exit_code_mapping():
    assert exit_code_for(UnsolvableBVPError("x"))[0] == 3
    assert exit_code_for(SingularPathError(1.0))[0] == 4
    assert exit_code_for(EvaluationError("x"))[0] == 5
    assert exit_code_for(ConvergenceError("x"))[0] == 5
    assert exit_code_for(ExpressionSyntaxError("x", 0))[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "reflectode.cli", "reduce", "--equation", "x' + x(-t)"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert "L1 L = D^2 + 1" in proc.stdout
