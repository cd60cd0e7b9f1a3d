import csv
import io
import json

import pytest

from diracpt import cli

PT = ["--model", "poeschl_teller", "--param", "lam=2"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def scatter_rows(capsys, *argv):
    code, out, _ = run(capsys, "scatter", *argv)
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_scatter_csv_columns_and_determinism(capsys):
    args = PT + ["--k-min", "0.2", "--k-max", "3", "--k-count", "5"]
    a = scatter_rows(capsys, *args)
    b = scatter_rows(capsys, *args, "--jobs", "3")
    assert len(a) == 5 and a == b
    assert tuple(a[0]) == tuple(cli.CSV_COLUMNS)
    for row in a:
        assert row["error"] == ""
        if row["pt_exact"] == "true":
            assert float(row["abs_R_LR"]) <= 1e-6


def test_scatter_json(capsys):
    code, out, _ = run(capsys, "scatter", *PT, "--E-min", "2.5", "--E-max", "3", "--E-count", "2",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == cli.SCHEMA and len(doc["rows"]) == 2


def test_expression_model(capsys):
    rows = scatter_rows(capsys, "--expr-P=-c*tanh(x)", "--param", "c=1", "--limits", "0,0,0,0,1,-1",
                        "--tail", "exponential:2", "--E-min", "1.8", "--E-max", "1.8")
    assert float(rows[0]["abs_R_LR"]) < 1e-6


@pytest.mark.parametrize("argv", [
    ["scatter", "--model", "nope", "--E-min", "2"],
    ["scatter", "--expr-V", "1/cosh(x", "--E-min", "2"],
    ["scatter", *PT, "--E-min", "3", "--E-max", "2", "--E-count", "4"],
    ["bound", "--model", "nogami_toyama", "--param", "lam=0.3"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_numeric_failure_row_exit_3(capsys):
    # E = -m sits on the degenerate channel of the free particle
    code, out, _ = run(capsys, "scatter", "--model", "free", "--E-min", "-1", "--E-max", "-1")
    assert code == 3
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["error"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "poeschl_teller", "param": ["lam=2"], "E_min": 2.5, "E_max": 2.5}))
    a = scatter_rows(capsys, "--config", str(cfg))
    b = scatter_rows(capsys, "--config", str(cfg), "--E-min", "3", "--E-max", "3")
    assert float(a[0]["E"]) == 2.5 and float(b[0]["E"]) == 3.0
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, _ = run(capsys, "scatter", "--config", str(cfg))
    assert code == 2


def test_bound_outputs(capsys):
    code, out, _ = run(capsys, "bound", "--model", "scalar_one_bound")
    recs = json.loads(out)
    assert code == 0 and len(recs) == 1
    assert recs[0]["kind"] == "Bound" and recs[0]["schema"] == cli.SCHEMA
    assert recs[0]["E"] == pytest.approx(2 / 5 ** 0.5, abs=1e-10)
    code, out, _ = run(capsys, "bound", "--model", "free")
    assert json.loads(out) == []
    code, out, _ = run(capsys, "bound", "--model", "centrifugal", "--param", "c_prime=1")
    (z,) = json.loads(out)
    assert z["kind"] == "ZeroMode" and z["E"] == 1.0


def test_bound_partner_records(capsys):
    code, out, _ = run(capsys, "bound", "--model", "super_scarf")
    tags = {r["partner"] for r in json.loads(out)}
    assert {"U1", "U2"} <= tags


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    names = [m["name"] for m in json.loads(out)["models"]]
    assert code == 0 and "nogami_toyama" in names and "scalar_one_bound" in names


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "scalar")
    assert code == 0 and "checks passed" in out
