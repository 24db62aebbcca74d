import json
import math

import pytest

from sparsefolio import cli

MINI = "date,A,B\n2024-01-02,100,50\n2024-01-03,110,50\n2024-01-04,121,55\n"


@pytest.fixture()
def mini_csv(tmp_path):
    f = tmp_path / "mini.csv"
    f.write_text(MINI)
    return str(f)


def test_solve_converged_exit_zero(mini_csv, tmp_path):
    out = tmp_path / "run"
    code = cli.main(
        ["solve", "--prices", mini_csv, "--beta1", "1.0", "--r", "0.05",
         "--out", str(out)]
    )
    assert code == 0
    doc = json.loads((tmp_path / "run.json").read_text())
    assert doc["result"]["termination"] == "gradient_tolerance"
    assert doc["result"]["asset_ids"] == ["A", "B"]
    assert len(doc["result"]["weights"]) == 2
    assert (
        len(doc["result"]["objective_trace"])
        == doc["result"]["iterations"] + 1
    )
    for key in ("expected_return", "variance_risk", "sparsity_pct",
                "nonzero_count", "budget_violation",
                "return_constraint_slack"):
        assert key in doc["report"]
    cfg = doc["config"]
    # resolved defaults are echoed, including the derived step size
    assert cfg["rho"] == 5.0
    assert cfg["epsilon"] == 1e-7
    assert cfg["max_iter"] == 10000
    assert cfg["projection"] == "paper"
    assert cfg["sigma"] == 1.0 / 32.0
    assert math.isclose(cfg["alpha"], 1.0 / cfg["lipschitz"], rel_tol=1e-12)
    assert len(doc["dataset"]["fingerprint"]) == 64


def test_solve_iteration_cap_exit_two(tmp_path):
    out = tmp_path / "capped"
    code = cli.main(
        ["solve", "--synthetic", "10,60,7,2", "--beta1", "0.5",
         "--out", str(out)]
    )
    assert code == 2
    doc = json.loads((tmp_path / "capped.json").read_text())
    assert doc["result"]["termination"] == "iteration_cap"


def test_solve_csv_format(mini_csv, tmp_path):
    out = tmp_path / "run"
    code = cli.main(
        ["solve", "--prices", mini_csv, "--beta1", "1.0", "--r", "0.05",
         "--out", str(out), "--format", "csv"]
    )
    assert code == 0
    lines = (tmp_path / "run.csv").read_text().splitlines()
    comments = [l for l in lines if l.startswith("# ")]
    assert any(l.startswith("# report_expected_return=") for l in comments)
    assert any(l.startswith("# dataset_fingerprint=") for l in comments)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "asset,weight"
    assert len(body) == 3
    assert body[1].startswith("A,")


def test_sweep_outputs(tmp_path):
    out = tmp_path / "sw"
    code = cli.main(
        ["sweep", "--synthetic", "10,60,7,2", "--beta1-grid", "0.5:1.5:0.5",
         "--max-iter", "800", "--out", str(out)]
    )
    assert code == 2  # sparse rows end at the cap; outputs still written
    csv_text = (tmp_path / "sw_sweep.csv").read_text()
    data = [l for l in csv_text.splitlines() if not l.startswith("#")]
    assert data[0].startswith("beta1,er_sepo")
    assert len(data) == 4
    for name in ("expected_return", "variance_risk", "sparsity"):
        doc = json.loads((tmp_path / f"sw_regression_{name}.json").read_text())
        assert doc["regression"]["response"] == name
        assert "slope" in doc["regression"]
        assert doc["config"]["rho"] == 5.0
        assert "fingerprint" in doc["dataset"]
    assert not (tmp_path / "sw_sweep.json").exists()


def test_sweep_json_format_adds_dump(tmp_path):
    out = tmp_path / "sj"
    code = cli.main(
        ["sweep", "--synthetic", "8,40,3,2", "--beta1-grid", "0.5:1.0:0.5",
         "--max-iter", "500", "--out", str(out), "--format", "json"]
    )
    assert code in (0, 2)
    doc = json.loads((tmp_path / "sj_sweep.json").read_text())
    assert len(doc["rows"]) == 2
    # two rows cannot support a fit; the error is recorded in place
    reg = json.loads((tmp_path / "sj_regression_sparsity.json").read_text())
    assert "error" in reg and "regression" not in reg


def test_sweep_repeat_byte_identical(tmp_path):
    argv = ["sweep", "--synthetic", "10,60,7,2", "--beta1-grid",
            "0.5:1.5:0.5", "--max-iter", "600", "--jobs", "2"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert cli.main(argv + ["--out", str(a / "s")]) == cli.main(
        argv + ["--out", str(b / "s")]
    )
    names = ["s_sweep.csv", "s_regression_expected_return.json",
             "s_regression_variance_risk.json", "s_regression_sparsity.json"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["solve", "--synthetic", "10,60,7,2", "--out", "x"],  # no --beta1
        ["solve", "--beta1", "1", "--out", "x"],  # no data source
        ["solve", "--synthetic", "10,60,7", "--beta1", "1", "--out", "x"],
        ["solve", "--synthetic", "a,b,c,d", "--beta1", "1", "--out", "x"],
        ["sweep", "--synthetic", "10,60,7,2", "--beta1-grid", "0.1:1.0:0",
         "--out", "x"],
        ["sweep", "--synthetic", "10,60,7,2", "--beta1-grid", "1.0:0.1:0.1",
         "--out", "x"],
        ["solve", "--synthetic", "10,60,7,2", "--beta1", "1", "--out", "x",
         "--format", "yaml"],
    ],
)
def test_usage_errors_exit_64(argv, capsys):
    assert cli.main(argv) == 64
    capsys.readouterr()


def test_both_sources_exit_64(mini_csv, capsys):
    code = cli.main(
        ["solve", "--prices", mini_csv, "--synthetic", "10,60,7,2",
         "--beta1", "1", "--out", "x"]
    )
    assert code == 64
    capsys.readouterr()


def test_jobs_validation(tmp_path, capsys):
    code = cli.main(
        ["sweep", "--synthetic", "8,40,3,2", "--beta1-grid", "0.5:1.0:0.5",
         "--jobs", "0", "--out", str(tmp_path / "x")]
    )
    assert code == 64


def test_missing_prices_file_exit_65(tmp_path, capsys):
    code = cli.main(
        ["solve", "--prices", str(tmp_path / "nope.csv"), "--beta1", "1",
         "--out", str(tmp_path / "x")]
    )
    assert code == 65
    assert "nope.csv" in capsys.readouterr().err


def test_invalid_prices_content_exit_65(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("date,A\n2024-01-02,100\n2024-01-03,0\n2024-01-04,90\n")
    code = cli.main(
        ["solve", "--prices", str(f), "--beta1", "1", "--out",
         str(tmp_path / "x")]
    )
    assert code == 65
    assert "line 3" in capsys.readouterr().err


def test_unreachable_return_exit_65(tmp_path, capsys):
    code = cli.main(
        ["solve", "--synthetic", "10,60,7,2", "--beta1", "1", "--r", "50",
         "--out", str(tmp_path / "x")]
    )
    assert code == 65
    assert "r_min" in capsys.readouterr().err


def test_beta1_grid_parsing():
    assert cli._beta1_grid("0.1:1.0:0.1") == pytest.approx(
        [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    )
    assert cli._beta1_grid("0.5:0.5:0.1") == [0.5]
    # decimal stepping keeps the endpoint despite binary rounding
    assert len(cli._beta1_grid("0.1:1.0:0.1")) == 10


def test_serve_invokes_uvicorn(monkeypatch):
    calls = {}

    def fake_run(app, host, port):
        calls["host"] = host
        calls["port"] = port

    import uvicorn

    monkeypatch.setattr(uvicorn, "run", fake_run)
    code = cli.main(["serve", "--host", "0.0.0.0", "--port", "9100"])
    assert code == 0
    assert calls == {"host": "0.0.0.0", "port": 9100}
