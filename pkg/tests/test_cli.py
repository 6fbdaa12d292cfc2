import json
import subprocess
import sys

import pytest

from qcapelli import capelli, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "-")
    return code, json.loads(out)


def test_eigen_prints_one(capsys):
    code, out, _ = run(capsys, "eigen", "--family", "diag", "--n", "1", "--lambda", "1", "--mu", "1")
    assert code == 0
    assert out.splitlines()[0] == "eigenvalue: 1"


def test_eigen_sweep(capsys):
    code, doc = run_json(capsys, "eigen", "--family", "ai", "--n", "1", "--lambda", "1", "--max-size", "2")
    assert code == 0
    assert doc["output"]["eigenvalues"] == ["(): 0", "(1): 1", "(2): q^4 + 1"]


def test_relations_contain_constant_rule(capsys):
    code, doc = run_json(capsys, "relations", "--family", "aii", "--n", "1", "--algebra", "xd")
    assert code == 0
    assert doc["schema"] == "qcapelli/1"
    assert doc["output"]["rules"] == ["d[1,2] x[1,2] -> 1 + q^2 * x[1,2] d[1,2]"]


@pytest.mark.parametrize("argv", [
    ["reflection", "--family", "aii", "--n", "2"],
    ["confluence", "--family", "diag", "--n", "2"],
    ["check-btheta", "--family", "aii", "--n", "2"],
    ["hvector", "--family", "ai", "--n", "2", "--lambda", "2,1"],
    ["lemma61", "--family", "diag", "--n", "2"],
    ["capelli", "--family", "ai", "--n", "2", "--lambda", "1"],
    ["knopsahi", "--n", "2", "--lambda", "2,1", "--a", "q^4", "--g", "q^2", "--normalized"],
    ["theoremb", "--family", "aii", "--n", "1", "--max-lambda", "2", "--max-mu", "3"],
    ["act", "--family", "ai", "--n", "2", "--op", "F1", "--elem", "x[1,1]"],
])
def test_commands_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    assert "FAIL" not in out


def test_act_output(capsys):
    code, doc = run_json(capsys, "act", "--family", "ai", "--n", "2", "--op", "K(1,0)", "--elem", "x[1,1]")
    assert code == 0
    assert doc["output"]["image"] == "q^2 * x[1,1]"


def test_failing_check_exits_one(capsys):
    code, out, _ = run(capsys, "lemma61", "--family", "ai", "--n", "2", "--constants", "printed")
    assert code == 1
    assert "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["eigen", "--family", "bogus", "--lambda", "1", "--mu", "1"],
    ["eigen", "--family", "ai", "--lambda", "1,2", "--mu", "1"],
    ["eigen", "--family", "ai", "--n", "1", "--lambda", "1,1", "--mu", "1"],
    ["eigen", "--family", "ai", "--lambda", "1"],
    ["confluence", "--budget-degree", "2"],
    ["knopsahi", "--lambda", "1", "--a", "q^^"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_internal_error_exits_three(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise capelli.CapelliError("invariance solve failed: kernel dimension 2")
    monkeypatch.setattr(capelli, "capelli_eigenvalue", broken)
    code, _, err = run(capsys, "eigen", "--family", "ai", "--n", "1", "--lambda", "1", "--mu", "1")
    assert code == 3
    assert "capelli" in err


def test_json_is_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        cli.main(["verify-all", "--family", "ai", "--n", "1", "--max-lambda", "2", "--json", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert doc["result"] == "pass"
    assert all(r["status"] == "pass" for r in doc["records"])


def test_verify_all_rank_two(capsys):
    code, doc = run_json(capsys, "verify-all", "--family", "diag", "--n", "2", "--max-lambda", "2")
    assert code == 0
    assert doc["result"] == "pass"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qcapelli", "eigen", "--family", "diag", "--n", "1",
                           "--lambda", "1", "--mu", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eigenvalue: 1")
