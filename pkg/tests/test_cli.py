"""Command-line reports: schema, provenance, determinism and exit codes."""

import csv
import io
import json
import subprocess
import sys

import pytest

from spinlab.cli import SCHEMA, agree, dumps, main


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _provenances(node, found):
    if isinstance(node, dict):
        if "provenance" in node:
            found.add(node["provenance"].split("(")[0])
        for value in node.values():
            _provenances(value, found)
    elif isinstance(node, list):
        for value in node:
            _provenances(value, found)
    return found


def test_agree_field():
    assert agree(0.5, 0.5)["provenance"].startswith("both-agree")
    far = agree(0.5, 0.6)
    assert far["provenance"].startswith("disagree")
    assert far["oracle_value"] == pytest.approx(0.6)


def test_invariants2_report(capsys):
    code, out, _ = _run(["invariants2", "--alpha", "0", "--beta", "1/3"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == SCHEMA
    assert report["failures"] == 0
    assert report["pp_constant"]["limit"]["exact"] == "1/2"
    assert _provenances(report, set()) <= {"formula", "oracle", "both-agree", "asserted"}


def test_invariants2_is_deterministic(capsys, monkeypatch):
    _, first, _ = _run(["invariants2", "--alpha", "1/7", "--beta", "3/5"], capsys)
    monkeypatch.setenv("SPINLAB_THREADS", "1")
    _, second, _ = _run(["invariants2", "--alpha", "1/7", "--beta", "3/5"], capsys)
    assert first == second


def test_invariants4_report_small(capsys):
    code, out, _ = _run(["invariants4", "--a", "0", "--b", "1/3", "--levels", "1"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["failures"] == 0
    assert "spectra" in report and "index" in report


@pytest.mark.parametrize(
    "argv",
    [
        ["invariants2", "--alpha", "0", "--beta", "1"],
        ["invariants4", "--a", "0", "--b", "3/2"],
        ["invariants4", "--a", "0", "--b", "0"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, out, err = _run(argv, capsys)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_bad_angle_text_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["invariants2", "--alpha", "0.3", "--beta", "1/3"])
    assert exc.value.code == 2


def test_table1_json_and_csv(capsys, tmp_path):
    code, out, _ = _run(["table1"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows["angle_set_size"]["four_by_four"]["table_entry_floor_n_over_2"] == [1, 1, 2]
    target = tmp_path / "table.csv"
    assert main(["table1", "--out", str(target)]) == 0
    parsed = list(csv.reader(io.StringIO(target.read_text())))
    assert len(parsed) > 1


def test_verify_passes_and_fuzz_fails(capsys):
    code, out, _ = _run(["verify", "--levels", "2"], capsys)
    assert code == 0
    assert json.loads(out)["failures"] == 0
    code, out, _ = _run(["verify", "--levels", "2", "--fuzz", "1e-3"], capsys)
    assert code == 1
    assert json.loads(out)["failures"] > 0


def test_dumps_sorted():
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "spinlab", "invariants2", "--alpha", "0", "--beta", "1/4", "--levels", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == SCHEMA
