import json

import jsonschema
import pytest

from wigner_calc import checks
from wigner_calc.checks import CRITERIA, REGISTRY, SuiteConfig
from wigner_calc.cli import build_report, emit_json, emit_table, load_schema, main


def run(capsys, *argv):
    code = main(["verify", *argv])
    return code, capsys.readouterr()


def body(text: str) -> dict:
    rep = json.loads(text)
    rep["summary"].pop("elapsed")
    for c in rep["checks"]:
        c.pop("elapsed")
    return rep


def test_every_criterion_has_a_check():
    assert set(CRITERIA) == set(range(1, 15))
    assert {c.criterion for c in REGISTRY} == set(CRITERIA)
    anchors = [c.anchor for c in REGISTRY]
    ids = [c.check_id for c in REGISTRY]
    assert len(set(anchors)) == len(anchors)
    assert len(set(ids)) == len(ids)
    assert {c.suite for c in REGISTRY} == set(checks.SUITES)


def test_json_report_validates(capsys):
    code, out = run(capsys, "--suite", "clark-ocone,cebron", "--format", "json")
    assert code == 0
    rep = json.loads(out.out)
    jsonschema.validate(rep, load_schema())
    assert [c["check_id"] for c in rep["checks"]] == sorted(c["check_id"] for c in rep["checks"])
    assert rep["summary"]["criteria"] == {"7": "PASS", "8": "PASS"}


def test_same_seed_same_body(capsys):
    _, a = run(capsys, "--suite", "clark-ocone", "--suite", "cebron", "--format", "json", "--seed", "3")
    _, b = run(capsys, "--suite", "cebron,clark-ocone", "--format", "json", "--seed", "3")
    assert body(a.out) == body(b.out)


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("WIGNER_CALC_SEED", "11")
    _, out = run(capsys, "--suite", "clark-ocone", "--format", "json")
    assert json.loads(out.out)["config"]["seed"] == 11
    _, out = run(capsys, "--suite", "clark-ocone", "--format", "json", "--seed", "5")
    assert json.loads(out.out)["config"]["seed"] == 5


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "cebron", "seed": 9, "basis": 4, "format": "json"}))
    _, out = run(capsys, "--config", str(cfg), "--seed", "10")
    rep = json.loads(out.out)
    assert rep["config"]["seed"] == 10
    assert rep["config"]["basis"] == 4
    assert rep["config"]["suites"] == ["cebron"]


def test_failing_check_gives_exit_one_and_fail_row(capsys):
    code, out = run(capsys, "--suite", "variance", "--tol", "1e-300")
    assert code == 1
    assert any(line.split()[2] == "FAIL" for line in out.out.splitlines()[2:] if line.startswith("variance."))


def test_failure_carries_inputs(capsys):
    code, out = run(capsys, "--suite", "variance", "--tol", "1e-300", "--format", "json")
    rep = json.loads(out.out)
    jsonschema.validate(rep, load_schema())
    failed = [c for c in rep["checks"] if c["status"] == "FAIL"]
    assert failed and all("inputs" in c for c in failed)


def test_report_file(capsys, tmp_path):
    path = tmp_path / "report.txt"
    code, out = run(capsys, "--suite", "clark-ocone", "--report", str(path))
    assert path.read_text() == out.out
    assert "clark-ocone.reconstruction" in out.out


@pytest.mark.parametrize("argv", [
    ["--suite", "nope"],
    ["--max-degree", "7", "--fock-level", "5"],
    ["--tol", "0"],
    ["--basis", "1"],
    ["--gue-dim", "1"],
])
def test_config_errors_exit_two(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2
    assert "config error" in out.err


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "--config", str(cfg))[0] == 2


def test_environment_seed_must_be_integer(capsys, monkeypatch):
    monkeypatch.setenv("WIGNER_CALC_SEED", "abc")
    assert run(capsys, "--suite", "cebron")[0] == 2


def test_empty_report_is_header_only():
    rep = build_report(SuiteConfig(suites=()), [], 0.0)
    jsonschema.validate(json.loads(emit_json(rep)), load_schema())
    assert json.loads(emit_json(rep))["checks"] == []
    lines = emit_table(rep).splitlines()
    assert len(lines) == 2 and lines[0].startswith("check")
