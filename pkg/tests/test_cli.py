import csv
import io
import json
import subprocess
import sys

import pytest

from miml.cli import fmt, main
from miml.ml import ESTIMANDS

SIX = "x,y\n1,1\n2,2\n3,2\n0,1\n-1,\n-2,\n"
CONFIG = {
    "n": 25,
    "pattern": "MXN",
    "estimators": ["ML", {"method": "PDMI", "D": 5, "nu_prior": 0}],
    "intervals": [{"estimator": "ML", "method": "tstar", "bounded": True}],
    "replications": 2500,
    "seed": 1,
}


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(CONFIG))
    return p


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_writes_outputs(cfg_path, tmp_path, capsys):
    out = tmp_path / "o"
    code, stdout, _ = run(["simulate", "--config", cfg_path, "--seed", 7, "--out", out, "--format", "csv"], capsys)
    assert code == 0
    assert {p.name for p in out.iterdir()} == {"summary.csv", "summary.txt", "manifest.json"}
    rows = list(csv.reader(io.StringIO((out / "summary.csv").read_text())))
    assert rows[0] == ["section", "label", "statistic", *ESTIMANDS]
    assert all(len(r) == 12 for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["config"]["replications"] == 2500
    assert stdout == (out / "summary.csv").read_text()


def test_simulate_worker_invariance(cfg_path, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["simulate", "--config", cfg_path, "--out", a, "--workers", 1], capsys)
    run(["simulate", "--config", cfg_path, "--out", b, "--workers", 2], capsys)
    assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()


def test_seed_env_fallback(cfg_path, tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MIML_SEED", "11")
    run(["simulate", "--config", cfg_path, "--out", tmp_path / "e", "--reps", 200], capsys)
    assert json.loads((tmp_path / "e" / "manifest.json").read_text())["seed"] == 11


def test_csv_cells_round_trip(cfg_path, capsys):
    _, stdout, _ = run(["simulate", "--config", cfg_path, "--reps", 300, "--format", "csv"], capsys)
    for row in list(csv.reader(io.StringIO(stdout)))[1:]:
        for cell in row[3:]:
            assert fmt(float(cell)) == cell or fmt(int(cell)) == cell


def test_simulate_errors(tmp_path, capsys):
    code, _, err = run(["simulate", "--config", tmp_path / "missing.json", "--out", tmp_path / "x"], capsys)
    assert code == 2 and "not found" in err and not (tmp_path / "x").exists()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(dict(CONFIG, p=0.2)))
    assert run(["simulate", "--config", bad], capsys)[0] == 2
    bad.write_text("{not json")
    assert run(["simulate", "--config", bad], capsys)[0] == 2
    assert run(["simulate"], capsys)[0] == 2


def test_io_error_exit_code(cfg_path, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["simulate", "--config", cfg_path, "--reps", 100, "--out", blocker / "sub"], capsys)
    assert code == 3


def test_reproduce_small(tmp_path, capsys):
    assert run(["reproduce", "table1", "--reps", 50], capsys)[0] == 2
    code, stdout, _ = run(["reproduce", "table3", "--reps", 100, "--out", tmp_path / "r"], capsys)
    assert code == 0 and "[.457 (1)]" in stdout
    rows = list(csv.DictReader(io.StringIO((tmp_path / "r" / "table3.csv").read_text())))
    assert len(rows) == 4 * 6 * 9 * 2 and {r["statistic"] for r in rows} == {"rmse", "rank"}


def test_estimate_six_point(tmp_path, capsys):
    p = tmp_path / "six.csv"
    p.write_text(SIX)
    code, stdout, _ = run(["estimate", p, "--format", "csv"], capsys)
    assert code == 0
    rows = {(r["estimand"], r["ci_method"]): r for r in csv.DictReader(io.StringIO(stdout))}
    assert float(rows[("beta_yx", "tstar")]["estimate"]) == pytest.approx(0.4)
    assert float(rows[("var_yx", "normal")]["estimate"]) == pytest.approx(0.05)
    code, stdout, _ = run(["estimate", p, "--method", "pdmi", "--seed", 3], capsys)
    assert code == 0 and "PDMI" in stdout


def test_estimate_complete_data(tmp_path, capsys):
    p = tmp_path / "full.csv"
    p.write_text("x,y\n" + "".join(f"{i},{(i * 7) % 5}\n" for i in range(25)))
    _, stdout, _ = run(["estimate", p, "--format", "csv", "--ci", "t", "--unbounded"], capsys)
    for r in csv.DictReader(io.StringIO(stdout)):
        assert float(r["gamma"]) == pytest.approx(0, abs=1e-12)
        assert float(r["df"]) == pytest.approx(23 * 24 / 26)


@pytest.mark.parametrize(
    "text", ["x,y\n,1\n1,2\n2,3\n3,3\n", "a,b\n1,2\n", "x,y\n1,NA\n2,3\n", "x,y\n1,2,3\n", "x,y\n1,nan\n"]
)
def test_estimate_rejects_bad_csv(tmp_path, capsys, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    code, _, err = run(["estimate", p], capsys)
    assert code == 2 and err


def test_estimate_missing_x_message(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n,1\n1,2\n")
    _, _, err = run(["estimate", p], capsys)
    assert "only Y may be missing" in err


def test_bias_command(capsys):
    code, out, _ = run(["bias", "--method", "pdsi", "--nu-prior", 2, "--n", 25, "--pattern", "mxn"], capsys)
    assert code == 0 and "resid_term: 0\n" in out
    code, out, _ = run(["bias", "--method", "mlsi", "--pattern", "mcar", "--n", 25, "--format", "csv"], capsys)
    assert float(out.splitlines()[1].split(",")[-1]) < 0
    code, out, _ = run(["bias", "--method", "pdsi", "--nu-prior", -2, "--n", 8, "--pattern", "mcar"], capsys)
    assert code == 0 and "undefined" in out
    assert run(["bias", "--n", 25, "--pattern", "mxn", "--p", 0.3], capsys)[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "miml", "bias", "--n", "100"], capture_output=True, text=True)
    assert r.returncode == 0 and "total" in r.stdout
