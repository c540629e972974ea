import csv
import io
import json
import subprocess
import sys

import pytest

from atdm import acceptance, cli
from atdm.acceptance import CheckResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_components_dump(capsys):
    code, out, _ = run(capsys, "components", "--problem", "ex3", "--n", "2")
    assert code == 0
    assert "u_1 = 4 * x^2 * t^(3+1*B) * G()/G(4+1*B)" in out
    assert out.count("\n") == 6


def test_n_zero_gives_initial_conditions(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "ex3", "--n", "0", "--x-min", "2",
                       "--x-max", "2", "--x-steps", "1", "--t-steps", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    last = rows[-1]
    assert float(last["u"]) == pytest.approx(4 * 0.35) and float(last["v"]) == 0.0
    assert last["u"] == "1.4000000000"


def test_solve_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["solve", "--problem", "ex2", "--beta", "0.7", "1", "--out", str(p)]) == 0
    assert a.read_text() == b.read_text()
    assert len(a.read_text().splitlines()) == 1 + 2 * 7 * 8


def test_solve_close_to_exact_at_beta_one(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "ex3", "--n", "11", "--format", "json")
    rows = json.loads(out)["rows"]
    # components 0..11; convergence on this grid comes in pairs of components
    for r in rows:
        assert r["u"] == pytest.approx(r["x"] ** 2 * r["t"], abs=1e-6)
        assert r["v"] == pytest.approx(r["x"] ** 2 * r["t"] ** 2, abs=1e-6)


def test_residual_command(capsys):
    code, out, _ = run(capsys, "residual", "--problem", "ex1", "--n", "4", "--beta", "0.8")
    assert code == 0
    assert out.splitlines()[0] == "beta,x,t,residual_u,residual_v"


def test_problem_file(capsys, tmp_path):
    from importlib import resources

    src = resources.files("atdm.data").joinpath("ex1.json").read_text()
    path = tmp_path / "p.json"
    path.write_text(src)
    _, from_file, _ = run(capsys, "components", "--problem", str(path), "--n", "2")
    _, builtin, _ = run(capsys, "components", "--problem", "ex1", "--n", "2")
    assert from_file == builtin


def test_table_command(capsys):
    code, out, _ = run(capsys, "table", "--id", "table5", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["metadata"]["N"] == 4
    assert len(payload["rows"]) == 2 * 4 * 35


@pytest.mark.parametrize("argv", [
    ["solve", "--beta", "1.5"],
    ["solve", "--beta", "0"],
    ["solve", "--n", "-1"],
    ["solve", "--problem", "nosuch"],
    ["solve", "--x-steps", "0"],
    ["table", "--id", "table9"],
    ["frobnicate"],
    ["solve", "--format", "xml"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_bad_problem_file_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    assert run(capsys, "solve", "--problem", str(path))[0] == 2


def test_computation_error_exit_3(capsys, tmp_path):
    # a negative x power evaluated on a grid that includes x = 0
    path = tmp_path / "sing.json"
    path.write_text(json.dumps({"f0": "1 * x^-1"}))
    code, _, err = run(capsys, "solve", "--problem", str(path), "--n", "0", "--x-min", "0")
    assert code == 3 and "computation" in err


def test_threads_env_override(monkeypatch):
    monkeypatch.setenv("ATDM_THREADS", "3")
    assert cli._workers(1) == 3
    monkeypatch.setenv("ATDM_THREADS", "many")
    with pytest.raises(cli.ConfigError):
        cli._workers(1)


def test_verify_exit_codes(capsys, monkeypatch):
    ok = CheckResult(1, "a", True, "fine")
    bad = CheckResult(2, "b", False, "off")
    monkeypatch.setattr(acceptance, "run_all", lambda: [ok])
    assert run(capsys, "verify")[0] == 0
    monkeypatch.setattr(acceptance, "run_all", lambda: [ok, bad])
    code, out, _ = run(capsys, "verify")
    assert code == 4
    assert "[FAIL] criterion 2" in out and "1/2 criteria passed" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "atdm.cli", "components", "--n", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout == "u_0 = 1 * x^2 * t^(1)\nv_0 = 0\n"
