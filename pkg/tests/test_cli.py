import json
import subprocess
import sys

import pytest

from l2sprophecy.cli import main, parse_bounds, UsageError


def run(tmp_path, *args):
    return main(["check", "--out", str(tmp_path / "out")] + list(args))


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "ticket" in out and "skeleton" in out


def test_parse_bounds():
    assert parse_bounds("a=1, b=2") == {"a": 1, "b": 2}
    for bad in ("a", "a=x"):
        with pytest.raises(UsageError):
            parse_bounds(bad)


def test_lasso_writes_artifacts(tmp_path, capsys):
    assert run(tmp_path, "--model", "ticket") == 1
    out = tmp_path / "out"
    assert {p.name for p in out.iterdir()} >= {"lasso.txt", "lasso.dot", "lasso.json"}
    d = json.loads((out / "lasso.json").read_text())
    assert d["i"] <= d["j"] < d["k"]
    assert "lasso-found" in capsys.readouterr().out


def test_no_lasso(tmp_path):
    assert run(tmp_path, "--model", "toggle") == 0


def test_invariant_and_export(tmp_path):
    assert run(tmp_path, "--model", "toggle", "--mode", "invariant", "--bounds", "elem=2") == 0
    assert run(tmp_path, "--model", "toggle", "--mode", "export-vc") == 0
    assert {"init.smt2", "consecution.smt2", "safety.smt2"} <= {p.name for p in (tmp_path / "out").iterdir()}


def test_budget_is_inconclusive(tmp_path):
    assert run(tmp_path, "--model", "ticket", "--prophecy", "ticket.prophecy", "--node-budget", "20") == 2


def test_closure_mode(tmp_path, capsys):
    assert run(tmp_path, "--mode", "closure-test", "--rounds", "3", "--seed", "1") == 0


@pytest.mark.parametrize("args, code", [
    (["--model", "toggle", "--bounds", "elem"], 10),
    (["--model", "toggle", "--frobnicate"], 10),
    (["--mode", "invariant"], 10),
    (["--model", "/no/such/file.model"], 15),
])
def test_usage_and_io_errors(tmp_path, args, code):
    with pytest.raises(SystemExit) if "--frobnicate" in args else _nothing() as e:
        rc = run(tmp_path, *args)
    if "--frobnicate" in args:
        assert e.value.code == code
    else:
        assert rc == code


@pytest.mark.parametrize("model, code", [
    ("(sort s)(relation p s", 11),
    ("(sort s)(relation p s)(init (p))", 11),
    ("(sort a b)(relation r a)(constant k b)(init (r k))", 12),
])
def test_model_errors(tmp_path, model, code):
    f = tmp_path / "m.model"
    f.write_text(model)
    p = tmp_path / "m.property"
    p.write_text("(property true)")
    assert run(tmp_path, "--model", str(f), "--property", str(p), "--bounds", "s=1") == code


def test_unknown_sort_in_bounds(tmp_path):
    assert run(tmp_path, "--model", "toggle", "--bounds", "elem=1,bogus=2") == 10


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "l2sprophecy.cli", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "toggle" in r.stdout


class _nothing:
    value = None

    def __enter__(self):
        return self

    def __exit__(self, *a):
        return False


def test_bad_bound_value_is_a_specification_error(tmp_path):
    assert run(tmp_path, "--model", "toggle", "--bounds", "elem=0") == 14
