import json
import subprocess
import sys

import pytest

from froblab.cli import main
from froblab.config import (EXAMPLES, RunConfig, builtin_path, load_toric_config, parse_hbar_window,
                            parse_series, read_config, read_config_text)
from froblab.errors import NonNegativityViolated, SchemaError, UnknownExample
from froblab.exact import Registry
from froblab.series import NovikovSeries

CONIFOLD = builtin_path("conifold").read_text()


def write(tmp_path, text, name="ex.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_every_builtin_parses():
    for name in EXAMPLES:
        cfg = read_config(builtin_path(name))
        assert cfg.get("example", "kind")


def test_run_config_validation():
    with pytest.raises(UnknownExample):
        RunConfig(example="nosuch")
    with pytest.raises(ValueError):
        RunConfig(example="cp1", order=0)
    with pytest.raises(ValueError):
        RunConfig(example="cp1", config_path="x.cfg")
    assert parse_hbar_window("-3:0") == (-3, 0)
    with pytest.raises(ValueError):
        parse_hbar_window("3")


def test_series_values():
    reg = Registry(("lam",))
    s = parse_series("lam^2/(1-q)", reg, 4)
    lam = reg.gen("lam")
    assert s.agrees(NovikovSeries.geometric(reg, 4).scale(lam * lam))
    with pytest.raises(SchemaError):
        parse_series("mu + q", reg, 4)
    with pytest.raises(SchemaError):
        parse_series("0.5*q", reg, 4)


def test_malformed_matrix_row_reports_line(tmp_path):
    bad = CONIFOLD.replace("m = 1 1", "m = 1 1; 1")
    path = write(tmp_path, bad)
    with pytest.raises(SchemaError) as err:
        load_toric_config(path)
    line = next(n for n, t in enumerate(bad.splitlines(), 1) if t.startswith("m ="))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_negative_chern_class_rejected(tmp_path):
    path = write(tmp_path, CONIFOLD.replace("l = 1 1", "l = 2 1"))
    with pytest.raises(NonNegativityViolated):
        load_toric_config(path)
    code = main(["run", "--config", str(path), "--order", "3"])
    assert code == 2


def test_unknown_symbol_and_kind(tmp_path):
    with pytest.raises(SchemaError) as err:
        load_toric_config(write(tmp_path, CONIFOLD.replace("lambda = lam, -lam", "lambda = lam, -mu")))
    assert err.value.line is not None
    cfg = read_config_text("[example]\nkind = nope\n")
    from froblab.config import kind_of
    with pytest.raises(SchemaError):
        kind_of(cfg)


def test_unknown_example_exit_code(capsys):
    assert main(["run", "nosuch"]) == 2
    assert "UnknownExample" in capsys.readouterr().err


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["run", "cp1-equivariant", "--order", "4", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["schema"] == "froblab-report/1" and doc["passed"]


@pytest.mark.parametrize("name", ["cp1", "a2", "a3-numeric", "dm-flow-demo"])
def test_builtin_examples_pass(name, capsys):
    assert main(["run", name, "--order", "4", "--format", "text"]) == 0
    assert "passed: True" in capsys.readouterr().out


def test_conifold_example(capsys):
    assert main(["run", "conifold", "--order", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert all(doc["checks"].values())


def test_suite_command(capsys):
    assert main(["suite", "--order", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and len(doc["criteria"]) == 10
    assert main(["suite", "--order", "3", "--perturb", "7", "--perturb", "3"]) == 1
    doc = json.loads(capsys.readouterr().out)
    failed = {row["criterion"] for row in doc["criteria"] if not row["passed"]}
    assert failed == {3, 7}


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "froblab.cli", "run", "a2", "--format", "text"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0, res.stderr
    assert "passed: True" in res.stdout
