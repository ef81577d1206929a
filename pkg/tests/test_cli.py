import json

import jsonschema
import pytest

from coniclap.cli import EXIT_INSTANCE, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, main
from coniclap.fixtures import example4_file

from conftest import ROOT

SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())


@pytest.fixture
def ex4a(tmp_path):
    p = tmp_path / "ex4a.cbf"
    p.write_text(example4_file("a"))
    return p


def test_run_writes_schema_valid_report(ex4a, tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["run", "--instance", str(ex4a), "--rounds", "3", "--zmicp", "-1", "--output", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    jsonschema.validate(data, SCHEMA)
    assert data["z_micp"] == -1.0
    assert data["rounds"][-1]["gap_pct"] > 0
    assert out.with_suffix(".csv").read_text().startswith("round,kstar,landp,density_pct,gap_pct,bound\n")
    assert "status=" in capsys.readouterr().err


def test_csv_is_byte_identical_across_runs(ex4a, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["run", "--instance", str(ex4a), "--rounds", "3", "--norm", "uniform",
                     "--csv", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_csv_time_column(ex4a, tmp_path, capsys):
    p = tmp_path / "t.csv"
    assert main(["run", "--instance", str(ex4a), "--rounds", "1", "--csv", str(p), "--csv-time"]) == EXIT_OK
    assert p.read_text().splitlines()[0].endswith(",seconds")


@pytest.mark.parametrize("argv", [
    [],
    ["run"],
    ["run", "--instance", "x.cbf", "--norm", "bogus"],
    ["run", "--instance", "x.cbf", "--rounds", "-1"],
    ["validate", "--instance", "x.cbf", "--cut", "c.json", "--bound", "1:2"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error:")


def test_instance_errors(tmp_path, cbf_dir, capsys):
    assert main(["run", "--instance", str(tmp_path / "missing.cbf")]) == EXIT_INSTANCE
    assert main(["parse", str(cbf_dir / "bad_cone.cbf")]) == EXIT_INSTANCE
    err = capsys.readouterr().err
    assert "line" in err


def test_solver_backend_error(ex4a, monkeypatch, capsys):
    monkeypatch.setenv("CONICLAP_BACKEND", "nope")
    assert main(["run", "--instance", str(ex4a), "--rounds", "1"]) == EXIT_SOLVER
    assert "solver backend" in capsys.readouterr().err


def test_parse_and_standardize(cbf_dir, capsys):
    assert main(["parse", str(cbf_dir / "soc.cbf")]) == EXIT_OK
    raw = json.loads(capsys.readouterr().out)
    assert raw
    assert main(["standardize", str(cbf_dir / "soc.cbf")]) == EXIT_OK
    std = json.loads(capsys.readouterr().out)
    assert std["n"] >= 3


def test_validate_command(ex4a, tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"alpha": [[1, -1.0], [2, -1.0]], "beta": -1.0, "n": 3}))
    assert main(["validate", "--instance", str(ex4a), "--cut", str(good)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["verdict"] == "Valid"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"alpha": [[1, -1.0], [2, -1.0]], "beta": 0.0, "n": 3}))
    assert main(["validate", "--instance", str(ex4a), "--cut", str(bad),
                 "--bound", "1:-1:1", "--bound", "2:-1:1"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "Violated" and "witness" in out


def test_example4_case_c_alpha(capsys):
    assert main(["example4", "--case", "c", "--norm", "alpha", "--json"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "cut:   -1*x1 >= 0" in out
    assert "LiftAndProject" in out
