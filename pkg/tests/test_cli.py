import csv
import json
import os

import pytest
from click.testing import CliRunner

from plk.ainfty import a2_quiver, mutation_slots, toggle_entry
from plk.amod import diagonal_shape_category
from plk.cli import main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EX = os.path.join(ROOT, "examples")


def run(*args):
    r = CliRunner().invoke(main, list(args))
    return r.exit_code, r.output


def report(out):
    return json.loads(out)


def test_trees_enum_four_leaves():
    code, out = run("trees", "enum", "--leaves", "4")
    rep = report(out)
    assert code == 0 and rep["count"] == 11 and rep["schema"] == "plk/1"
    assert "tolerances" in rep


def test_ainfty_check_example():
    code, out = run("ainfty", "check", os.path.join(EX, "a2.json"))
    assert code == 0 and report(out)["ok"]


def test_ainfty_check_failure_exit_1(tmp_path):
    e = diagonal_shape_category(4)
    bad = toggle_entry(e, *mutation_slots(e)[0])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad.to_json()))
    code, out = run("ainfty", "check", str(p))
    assert code == 1 and report(out)["report"]["violations"]


def test_schema_errors_exit_2(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"objects": ["A", "B"], "homs": {"A->B": {"x": "zero"}}}))
    r = CliRunner().invoke(main, ["ainfty", "check", str(p)])
    assert r.exit_code == 2
    assert "/homs/A->B/x" in r.output
    p.write_text("{not json")
    assert CliRunner().invoke(main, ["ainfty", "check", str(p)]).exit_code == 2
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"W": [[0, 0], [1, 0], "x"]}))
    r = CliRunner().invoke(main, ["lg", "crit", "--model", str(m)])
    assert r.exit_code == 2 and "/W/2" in r.output


def test_deterministic_reports():
    a = run("koszul", "verify")
    b = run("koszul", "verify")
    assert a == b and a[0] == 0


def test_qd_three_point():
    code, out = run("qd", "three-point", "--residues", "1,1,1")
    rep = report(out)
    assert code == 0 and rep["b"] == ["1/2", "1/2", "1/2"] and rep["zero_free_boundary"]
    code, out = run("qd", "three-point", "--residues", "3,1,1")
    assert not report(out)["zero_free_boundary"]


def test_quotient_command():
    code, out = run("quotient", os.path.join(EX, "a2.json"), "--sub", "S1")
    rep = report(out)
    assert code == 0 and rep["cohomology"]["S2->S2"] == {"0": 1}


def test_thimble_csv_on_real_ray(tmp_path):
    code, out = run("--out", str(tmp_path), "lg", "thimble", "--model", os.path.join(EX, "quadratic.json"),
                    "--crit", "1", "--theta", "0")
    assert code == 0
    with open(tmp_path / "thimble.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(float(r["re_W"]) >= 0 and abs(float(r["im_W"])) < 1e-12 for r in rows)


def test_config_overrides_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"quotient": {"sub": "S1,S2"}}))
    code, out = run("--config", str(cfg), "quotient", os.path.join(EX, "a2.json"), "--sub", "S1")
    assert code == 0 and report(out)["sub"] == ["S1", "S2"]


@pytest.mark.parametrize("method", ["auto"])
def test_lg_solitons_long_neck(tmp_path, method):
    code, out = run("--out", str(tmp_path), "lg", "solitons", "--model", os.path.join(EX, "cubic.json"),
                    "--pair", "U2,S1", "--R", "20", "--method", method)
    rep = report(out)
    assert code == 0 and rep["count"] == 2 and rep["mod2"] == 0 and rep["method"] == "glue"
    assert sorted(s["label"] for s in rep["solitons"]) == [1, 2]
    with open(tmp_path / "solitons.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["soliton", "s", "re_p", "im_p"] and len(rows) > 100
