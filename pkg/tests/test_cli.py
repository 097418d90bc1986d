import csv
import io
import json

import pytest

from quasitoric.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_polytope_text(capsys):
    code, out, _ = run(capsys, "polytope", "4", "7")
    assert code == 0
    assert "1, 3, 6, 3, 1" in out or "1 3 6 3 1" in out or "(1, 3, 6, 3, 1)" in out


def test_polytope_json(capsys):
    code, out, _ = run(capsys, "polytope", "4", "7", "--format", "json")
    d = json.loads(out)
    assert d["faces"]["h_vector"] == [1, 3, 6, 3, 1]
    assert len(d["polytope"]["vertices"]) == 14


def test_enumerate_real_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "real", "5", "8", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2
    assert json.loads(rows[0]["matrix"])[0][0] == 1


def test_enumerate_empty_is_not_an_error(capsys):
    code, out, _ = run(capsys, "enumerate", "real", "4", "8", "--format", "json")
    assert code == 0
    assert json.loads(out)["classes"] == []


@pytest.mark.parametrize("argv", [
    ["enumerate", "real", "1", "3"],
    ["enumerate", "int", "3", "6", "--bound", "0"],
    ["polytope", "x", "7"],
    ["reproduce", "nope"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert _exit_code(argv) == 2


def _exit_code(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def test_classify_surfaces(capsys):
    code, out, _ = run(capsys, "classify", "2", "4", "--bound", "2", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["ring_classes"]


def test_reproduce_passing_recipe(capsys):
    code, out, _ = run(capsys, "reproduce", "table1")
    assert code == 0
    assert "PASS" in out or "ok" in out.lower()


def test_reproduce_reports_differences(capsys):
    # A_1 and A_2 turn out isomorphic to A_3, so this recipe cannot pass
    code, out, _ = run(capsys, "reproduce", "c36-iso", "--format", "json")
    assert code == 1
    d = json.loads(out)
    failed = [c["name"] for r in d["results"] for c in r["checks"] if not c["ok"]]
    assert failed and all("A_3" in name or "A_d" in name for name in failed)


def test_json_is_deterministic_across_jobs(capsys, tmp_path):
    names = "gale-check,table1,c47-real"
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["reproduce", names, "--format", "json", "--output", str(a)]) == 0
    assert main(["reproduce", names, "--format", "json", "--jobs", "2", "--output", str(b)]) == 0
    assert a.read_text() == b.read_text()
    assert [r["recipe"] for r in json.loads(a.read_text())["results"]] == names.split(",")


def test_moduli_flag(capsys):
    code, out, _ = run(capsys, "classify", "4", "7", "--moduli", "3,4", "--format", "json")
    assert code == 0
    assert len(json.loads(out)["ring_classes"]) == 4
