import csv
import json

import pytest

from radialblowup.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_ball(capsys):
    code, out, _ = run(capsys, "classify", "--p", "1", "--s", "5", "--ball", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["regime"] == "UBoundedVBlows" and doc["schema_version"] == 1


def test_classify_boundary_numeric_exits_3(capsys):
    code, out, _ = run(capsys, "classify", "--p", "1", "--s", "4", "--ball", "1", "--method", "numeric")
    assert code == 3 and json.loads(out)["regime"] == "Inconclusive"


def test_classify_entire(capsys):
    code, out, _ = run(capsys, "classify", "--p", "0.5", "--s", "1", "--entire")
    assert code == 0 and json.loads(out)["regime"] == "GlobalExistence"


def test_equilibria(capsys):
    code, out, _ = run(capsys, "equilibria", "--p", "0.5", "--s", "1")
    doc = json.loads(out)
    assert doc["xi2"] == {"label": "xi2", "Y": 6.0, "Z": 6.0, "W": 7.0}
    assert doc["stable"] is True


def test_flow_json(capsys):
    code, out, _ = run(capsys, "flow", "--p", "0.5", "--s", "1", "--t1", "60")
    assert json.loads(out)["omega_limit"] == "converged-to-xi2"


def test_solve_csv_with_sidecar(tmp_path, capsys):
    out = tmp_path / "sol.csv"
    code, _, _ = run(capsys, "solve", "--p", "1", "--s", "2", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["r", "u", "v", "du", "dv"]
    side = json.loads((tmp_path / "sol.csv.blowup.json").read_text())
    assert side["v_blows"] and side["R_est"] > 0


def test_solve_json_stdout(capsys):
    code, out, _ = run(capsys, "solve", "--p", "0.5", "--s", "1", "--rmax", "100")
    doc = json.loads(out)
    assert doc["blowup"] is None and doc["r_end"] == 100.0


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 1, "s": 5, "domain": {"ball": 1}}))
    _, out, _ = run(capsys, "classify", "--config", str(cfg))
    assert json.loads(out)["regime"] == "UBoundedVBlows"
    _, out, _ = run(capsys, "classify", "--config", str(cfg), "--s", "2")
    assert json.loads(out)["regime"] == "BothBlowUp"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--p", "0.5", "--s", "1")
    assert code == 0 and json.loads(out)["u_prefactor_winner"] == "BD"


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--p-values", "0.5", "--s-values", "1,3", "--workers", "2")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 2
    assert rows[0]["status"] == "ok" and rows[1]["status"].startswith("ineligible")


@pytest.mark.parametrize("argv", [
    ("classify", "--p", "-1", "--s", "2", "--ball", "1"),
    ("classify", "--bogus"),
    ("equilibria", "--p", "1", "--s", "2"),
    ("flow", "--p", "0.5", "--s", "1", "--xi0", "1,2"),
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert "error" in json.loads(err)
