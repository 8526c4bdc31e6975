import json
import subprocess
import sys

import numpy as np
import pytest

from invdet.cli import main, parse_gen, parse_lambda, ConfigError
from invdet.matcore import dump_matrix, identity
from invdet.reporting import dumps, fmt_float

A2 = identity(2) + np.array([[0.1, 0.2], [0, -0.1]])


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def a2_file(tmp_path):
    p = tmp_path / "a2.json"
    dump_matrix(A2, p)
    return str(p)


def test_parse_gen():
    g = parse_gen("seed=3,k=2,frac=0.5")
    assert (g.seed, g.k, g.frac) == (3, 2, 0.5)
    for bad in ("seed=1,k=2", "seed=-1,k=2,frac=0.5", "seed=1,k=0,frac=0.5",
                "seed=1,k=2,frac=0", "seed=1,k=2,frac=1.5", "seed=1,k=2,frac=0.5,x=1"):
        with pytest.raises(ConfigError):
            parse_gen(bad)
    assert parse_gen("seed=1,k=2,frac=1.5", force=True).frac == 1.5


def test_parse_lambda():
    assert parse_lambda("3") == 3
    assert parse_lambda("3,-1") == 3 - 1j
    with pytest.raises(ConfigError):
        parse_lambda("1,2,3")


def test_eval_lu_identity(tmp_path, capsys):
    p = tmp_path / "i3.json"
    dump_matrix(identity(3), p)
    code, out, _ = run(capsys, "eval", "--matrix", str(p), "--method", "lu")
    assert code == 0
    res = json.loads(out)
    assert res["value"] == {"re": 1.0, "im": 0.0}
    assert res["deviation"] == 0


def test_eval_series_example(a2_file, capsys):
    code, out, _ = run(capsys, "eval", "--matrix", a2_file, "--method", "series", "--order", "12")
    assert code == 0
    res = json.loads(out)
    assert abs(complex(res["value"]["re"], res["value"]["im"]) - 1 / 0.99) <= 1e-10
    assert res["params"]["order"] == 12
    assert res["gate"]["inside_strict"] is True


@pytest.mark.parametrize("method", ["series", "relaxed", "tracelog", "contour", "lu"])
def test_eval_every_method(method, capsys):
    code, out, _ = run(capsys, "eval", "--gen", "seed=5,k=2,frac=0.4", "--method", method)
    assert code == 0
    res = json.loads(out)
    if method != "relaxed":
        assert res["deviation"] <= 1e-9


def test_convergence_zero_matrix(tmp_path, capsys):
    p = tmp_path / "i2.json"
    dump_matrix(identity(2), p)
    code, out, _ = run(capsys, "convergence", "--matrix", str(p), "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,re,im,abs_error"
    assert lines[1:] == ["0,1.0,0.0,0.0"]


def test_convergence_scalar(tmp_path, capsys):
    p = tmp_path / "s.json"
    dump_matrix([[1.5]], p)
    code, out, _ = run(capsys, "convergence", "--matrix", str(p), "--order", "20")
    assert code == 0
    errs = [r["abs_error"] for r in json.loads(out)["rows"]]
    assert len(errs) == 21
    for e0, e1 in zip(errs[:-1], errs[1:]):
        assert e1 == pytest.approx(0.5 * e0, rel=1e-9)


def test_convergence_contour(capsys):
    code, out, _ = run(capsys, "convergence", "--gen", "seed=2,k=3,frac=0.8",
                       "--method", "contour", "--nodes", "64")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["index"] for r in rows] == [1, 2, 4, 8, 16, 32, 64]
    assert rows[-1]["abs_error"] <= 1e-12


def test_charpoly(a2_file, capsys):
    code, out, _ = run(capsys, "charpoly", "--matrix", a2_file, "--lambda", "2,1")
    assert code == 0
    res = json.loads(out)
    assert res["deviation"] <= 1e-12
    assert res["degree_offset"] == -2


def test_charpoly_domain(a2_file, capsys):
    code, _, err = run(capsys, "charpoly", "--matrix", a2_file, "--lambda", "0.01")
    assert code == 3
    assert json.loads(err)["error"] == "DomainViolation"


def test_verify_exit_codes(capsys):
    for seed in (0, 1):
        code, out, _ = run(capsys, "verify", "--seed", str(seed), "--samples", "3")
        assert code == 0
        assert json.loads(out)["passed"] is True


def test_force_reaches_gate(capsys):
    code, _, err = run(capsys, "eval", "--gen", "seed=1,k=2,frac=1.5", "--force",
                       "--method", "contour")
    assert code == 3
    assert json.loads(err)["error"] == "GateViolation"


def test_cost_guard(capsys):
    code, _, err = run(capsys, "eval", "--gen", "seed=1,k=3,frac=0.5",
                       "--method", "contour", "--nodes", "64", "--budget", "1000")
    assert code == 3
    assert json.loads(err)["error"] == "CostGuard"


def test_config_errors(tmp_path, capsys):
    assert run(capsys, "eval", "--gen", "seed=1,k=2,frac=1.5")[0] == 2
    assert run(capsys, "eval", "--matrix", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "eval")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 2, "re": [[1]]}')
    assert run(capsys, "eval", "--matrix", str(bad))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--method", "nope"])
    assert exc.value.code == 2


def test_json_floats_round_trip():
    for x in (1 / 3, 1 / 0.99, 1e-300, -2.5e17, 0.1, 1.0):
        s = fmt_float(x)
        assert float(s) == x
        assert isinstance(json.loads(s), float)
    text = dumps({"z": 1 / 3 + 2j, "xs": [np.float64(0.1)], "n": np.int64(4)})
    obj = json.loads(text)
    assert obj["z"]["re"] == 1 / 3 and obj["xs"] == [0.1] and obj["n"] == 4


def test_output_file_and_determinism(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert main(["eval", "--gen", "seed=9,k=3,frac=0.7", "--method", "contour",
                     "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert capsys.readouterr().out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "invdet", "eval", "--gen",
                           "seed=0,k=2,frac=0.5", "--method", "lu", "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0] == "re,im,deviation"
