from __future__ import annotations

import io
import json

import pytest

from dirichlet_arg.cli import EXIT_CONSTRAINT, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, run


class _Out(io.StringIO):
    pass


def _run(argv):
    out, err = _Out(), _Out()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_constants_json():
    code, out, _ = _run(["constants"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["meta"]["command"] == "constants"
    assert doc["meta"]["precision"] == "double"
    assert "numpy" in doc["meta"]["versions"]


def test_constraint_exit():
    code, _, err = _run(["constants", "--delta", "0.2"])
    assert code == EXIT_CONSTRAINT
    assert "δ < 2/(8k+3)" in err


def test_usage_exit():
    assert _run(["bogus"])[0] == EXIT_USAGE
    assert _run([])[0] == EXIT_USAGE
    assert _run(["constants", "--prec", "quad"])[0] == EXIT_USAGE
    assert _run(["zeros"])[0] == EXIT_USAGE


def test_littlewood_narrow_window():
    code, _, err = _run(["littlewood-check", "--a", "2", "--t1", "-1", "--t2", "1"])
    assert code == EXIT_CONSTRAINT and err


def test_littlewood_ok():
    code, out, _ = _run(["littlewood-check", "--a", "2", "--t1", "-3", "--t2", "3"])
    assert code == EXIT_OK
    assert abs(json.loads(out)["rows"][0]["difference"]) < 1e-10


def test_first_zeros_csv_and_determinism():
    a = _run(["first-zeros", "--q", "3", "--format", "csv"])
    b = _run(["first-zeros", "--q", "3", "--format", "csv"])
    assert a[0] == EXIT_OK and a[1] == b[1]
    body = [ln for ln in a[1].splitlines() if ln and not ln.startswith("#")]
    assert len(body) == 2  # header and one character


def test_env_override(monkeypatch):
    flag = _run(["first-zeros", "--q", "3"])[1]
    monkeypatch.setenv("DIRARG_Q", "3")
    env = _run(["first-zeros"])
    assert env[0] == EXIT_OK and env[1] == flag
    monkeypatch.setenv("DIRARG_Q", "5")
    assert _run(["first-zeros", "--q", "3"])[1] == flag


def test_env_bad_value(monkeypatch):
    monkeypatch.setenv("DIRARG_Q", "three")
    assert _run(["first-zeros"])[0] == EXIT_USAGE


def test_output_file(tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = _run(["constants", "--output", str(path)])
    assert code == EXIT_OK and out == ""
    assert json.loads(path.read_text())["meta"]["command"] == "constants"


def test_unwritable_output(tmp_path):
    code, _, err = _run(["constants", "--output", str(tmp_path / "missing" / "r.json")])
    assert code == EXIT_NUMERIC and "cannot write" in err


def test_timings_flag():
    doc = json.loads(_run(["mollifier", "--xi", "10", "--timings"])[1])
    assert doc["meta"]["elapsed"] >= 0
    plain = json.loads(_run(["mollifier", "--xi", "10"])[1])
    assert "elapsed" not in plain["meta"]


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_density_outside_range_report(fmt):
    argv = ["density-empirics", "--q", "101", "--kappa", "0.1", "--sigma", "0.75",
            "--t1", "0", "--t2", "10", "--format", fmt]
    assert _run(argv)[0] == EXIT_CONSTRAINT
    assert _run(argv + ["--no-strict"])[0] == EXIT_OK


def test_module_entry():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "dirichlet_arg", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
