import json

import pytest

from ncfa import cli
from ncfa.errors import BadConfig


def test_unknown_suite_is_config_error(capsys):
    assert cli.main(["--suite", "nonexistent"]) == cli.EXIT_CONFIG
    assert "unknown suite" in capsys.readouterr().err
    with pytest.raises(BadConfig):
        cli.RunConfig("nonexistent").names()


def test_bad_flags_are_config_errors():
    assert cli.main(["--seed", "x"]) == cli.EXIT_CONFIG
    assert cli.main(["--suite", "hankel", "--trials", "0"]) == cli.EXIT_CONFIG
    assert cli.main(["--suite", "hankel-profile", "--json"]) == cli.EXIT_CONFIG


def test_report_schema_and_exit(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["--suite", "fk-determinant", "--seed", "1", "--trials", "20", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert set(rep) == {"suite", "seed", "results", "version"}
    assert rep["suite"] == "fk-determinant" and rep["seed"] == 1
    assert all({"name", "status", "residual"} <= set(r) for r in rep["results"])
    assert all(r["status"] == "PASS" for r in rep["results"])


def test_jordan_report_contains_witness(tmp_path):
    out = tmp_path / "j.json"
    cli.main(["--suite", "jordan-counterexample", "--trials", "5", "--out", str(out)])
    rep = json.loads(out.read_text())
    row = next(r for r in rep["results"] if "-E14" in r["name"])
    w = row["witness"]
    assert row["status"] == "PASS" and w["re"][3] == -1.0 and sum(map(abs, w["re"])) == 1.0


def test_csv_outputs(tmp_path):
    out = tmp_path / "u.csv"
    assert cli.main(["--suite", "unit-log-integral", "--csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "R,integral,reference" and len(lines) == 82
    out2 = tmp_path / "h.csv"
    assert cli.main(["--suite", "hankel", "--csv", "--out", str(out2)]) == 0
    assert out2.read_text().splitlines()[0] == "suite,seed,name,status,residual"


def test_failures_give_exit_one(monkeypatch):
    from ncfa import suites

    monkeypatch.setitem(suites.SUITES, "hankel", lambda ctx: [suites.check("always fails", False, 1.0)])
    assert cli.main(["--suite", "hankel"]) == cli.EXIT_FAIL


def test_unwritable_output_is_reported(tmp_path):
    assert cli.main(["--suite", "hankel", "--out", str(tmp_path / "missing" / "r.json")]) == cli.EXIT_CONFIG


def test_seed_fan_out_is_per_suite_and_index():
    from ncfa.suites import Context

    a, b = Context("hankel", 3), Context("potential", 3)
    assert a.rng(0).random() != b.rng(0).random()
    assert a.rng(0).random() != a.rng(1).random()
    assert a.rng(2).random() == Context("hankel", 3).rng(2).random()
