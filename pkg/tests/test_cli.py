import json
import subprocess
import sys

import pytest

from multigp import Scenario, __version__, load_document, render_report, solve_problem
from multigp.cli import main
from multigp.io import problem_to_dict
from multigp.pipeline import RunReport

from conftest import PROBLEMS

EX1 = str(PROBLEMS / "example1.gp.json")
EX2 = str(PROBLEMS / "example2.gp.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_example1_json(capsys):
    code, out, _ = run(capsys, "solve", EX1, "--scenario", "all", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    z = [s["Z"] for s in rep["scenarios"]]
    assert [s["scenario"] for s in rep["scenarios"]] == ["L", "M", "U"]
    assert z == pytest.approx([125.9045, 194.9390, 296.2627], rel=1e-3)
    assert rep["version"] == __version__
    assert set(rep["scenarios"][0]["weights"]) == {"w01", "w02", "w03", "w11", "w12"}


def test_example2_high(capsys):
    code, out, err = run(capsys, "solve", EX2, "--scenario", "U")
    assert code == 0
    assert "Z^U           = 23.22874" in out
    assert "decreasing" in err


def test_text_row(capsys):
    code, out, _ = run(capsys, "solve", EX1)
    assert code == 0 and "Z^M           = 194.9390" in out


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "missing.json")
    assert code == 2 and "missing.json" in err


def test_invalid_document(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"variables": ["x"], "objective": {"terms": [{"coef": [2, 1, 3]}]}}')
    code, _, err = run(capsys, "solve", str(f))
    assert code == 2 and "low <= mid <= high" in err


def test_infeasible_dual_exit(tmp_path, capsys):
    f = tmp_path / "unbounded.json"
    f.write_text('{"variables": ["x"], "objective": {"terms": [{"coef": 1, "exponents": {"x": 1}}]}}')
    code, out, _ = run(capsys, "solve", str(f), "--format", "json")
    assert code == 1
    assert {s["status"] for s in json.loads(out)["scenarios"]} == {"INFEASIBLE_DUAL"}


def test_nonconverged_exit(capsys):
    code, out, _ = run(capsys, "solve", EX1, "--max-iter", "1", "--format", "json")
    assert code == 3
    assert json.loads(out)["scenarios"][0]["status"] == "NONCONVERGED"


def test_bad_option(capsys):
    code, _, _ = run(capsys, "solve", EX1, "--tol", "0")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["solve", EX1, "--scenario", "Q"])
    assert info.value.code == 2


def test_oracle_and_sweep(capsys):
    code, out, _ = run(capsys, "solve", EX1, "--oracle-check", "--sweep", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert all(s["oracle"]["agrees"] for s in rep["scenarios"])
    assert rep["sweep"]["combos"] == 243
    assert isinstance(rep["sweep"]["low_attains_min"], bool)


def test_sweep_cap(tmp_path, capsys):
    terms = [{"coef": [1, 2, 3], "exponents": {"x": 1}} for _ in range(13)]
    terms.append({"coef": 1, "exponents": {"x": -1}})
    f = tmp_path / "big.json"
    f.write_text(json.dumps({"variables": ["x"], "objective": {"terms": terms}}))
    code, out, _ = run(capsys, "solve", str(f), "--sweep", "--scenario", "M", "--format", "json")
    assert code == 3 and "cap" in json.loads(out)["sweep_error"]


def test_json_deterministic(capsys):
    outs = [run(capsys, "solve", EX2, "--format", "json", "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "solve", EX1, "--scenario", "L", "--format", "json", "--timing")
    assert json.loads(out)["scenarios"][0]["wall_time"] >= 0


def test_json_matches_memory():
    doc = load_document(EX1)
    rep = RunReport(__version__, problem_to_dict(doc.problem))
    rep.scenarios = solve_problem(doc.problem)
    back = json.loads(render_report(rep, "json"))
    for s, r in zip(back["scenarios"], rep.scenarios):
        assert s["Z"] == r.dual_value
        assert s["x"] == r.x and s["weights"] == r.weights and s["lambda"] == r.lam


def test_text_and_json_same_fields():
    doc = load_document(EX2)
    rep = RunReport(__version__, problem_to_dict(doc.problem))
    rep.scenarios = solve_problem(doc.problem, [Scenario.LOW])
    text = render_report(rep, "text")
    s = json.loads(render_report(rep, "json"))["scenarios"][0]
    for name, value in list(s["weights"].items()) + list(s["x"].items()):
        assert f"{name} " in text and f"{value:#.7g}" in text


def test_empty_report():
    rep = RunReport(__version__, {"name": "empty", "variables": ["x"], "constraints": []})
    text = render_report(rep, "text")
    assert text.count("\n") == 1 and "empty" in text
    assert json.loads(render_report(rep, "json"))["scenarios"] == []
    with pytest.raises(ValueError):
        render_report(rep, "xml")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multigp", "solve", EX1, "--scenario", "L"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Z^L" in proc.stdout
