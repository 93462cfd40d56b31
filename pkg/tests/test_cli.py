import csv
import json
import math
import subprocess
import sys

import pytest

from specphase.cli import main
from specphase.ensembles import read_edge_list
from specphase.spectral import read_eigenvector


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_regular_example(tmp_path, capsys):
    path = str(tmp_path / "g.el")
    code, out, _ = run(capsys, "gen", "--regular", "-N", "10000", "-c", "3", "--gamma-struct", "0.9",
                       "--seed", "1", "-o", path)
    assert code == 0
    rec = json.loads(out)
    assert rec["cross_edges"] == 750 and rec["edges"] == 15000 and rec["isolated"] == 0
    assert read_edge_list(path).cross_edge_count() == 750


def test_gen_global_flags_before_subcommand(tmp_path, capsys):
    path = str(tmp_path / "g.el")
    code, out, _ = run(capsys, "--seed", "4", "--format", "csv", "gen", "--sbm", "-N", "500",
                       "--cin", "9", "--cout", "3", "--out", path)
    assert code == 0
    assert out.splitlines()[0].startswith("n,k,edges")
    assert out.splitlines()[1].endswith(f",4,{path}")


def test_gen_infeasible_is_usage_error(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--regular", "-N", "6", "-c", "3", "--gamma-struct", "1",
                       "-o", str(tmp_path / "x.el"))
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["gen", "--regular", "-N", "100", "-c", "3"],
    ["gen", "--sbm", "-N", "100"],
    ["gen", "--regular", "-N", "100", "-c", "3", "--gamma-struct", "0.5"],
    ["ema", "--regular", "3"],
    ["ema", "--regular", "2", "--thresholds"],
    ["spectral", "/nonexistent/file.el"],
    ["sweep", "/nonexistent/config"],
    ["frobnicate"],
    ["--threads", "0", "ema", "--regular", "3", "--thresholds"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_spectral_with_eigvec_and_laplacian(tmp_path, capsys):
    g = tmp_path / "k4.el"
    edges = [(a, b) for off in (0, 4) for a in range(off, off + 4) for b in range(a + 1, off + 4)]
    g.write_text("# specphase-graph N=8 K=24\n" + "".join(f"{a} {b}\n" for a, b in edges)
                 + "# labels\n" + "1\n" * 4 + "2\n" * 4)
    vec = tmp_path / "v.txt"
    code, out, _ = run(capsys, "spectral", str(g), "--eigvec", str(vec), "--laplacian")
    assert code == 0
    rec = json.loads(out)
    assert rec["lambda1"] == pytest.approx(3.0, abs=1e-8)
    assert rec["overlap"] == 1.0 and rec["disconnected"] is True
    lam, _, x = read_eigenvector(vec)
    assert lam == rec["lambda1"] and x.size == 8


def test_spectral_convergence_failure_exit_1(tmp_path, capsys):
    path = str(tmp_path / "g.el")
    run(capsys, "gen", "--regular", "-N", "4000", "-c", "3", "--gamma-struct", "0.3", "-o", path)
    code, _, err = run(capsys, "spectral", path, "--tol", "1e-14", "--max-iter", "5")
    assert code == 1 and "best residual" in err


def test_ema_regular_examples(capsys):
    code, out, _ = run(capsys, "ema", "--regular", "3", "--gamma-struct", "0.5")
    rec = json.loads(out)
    assert code == 0 and rec["phase"] == "U"
    assert rec["lambda1"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    code, out, _ = run(capsys, "ema", "--regular", "3", "--thresholds", "--theta", "0.02")
    rec = json.loads(out)
    assert rec["gamma_star"] == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert rec["gamma_un"] == pytest.approx((2.94 + math.sqrt(2.94 ** 2 - 8)) / 4, abs=1e-9)
    assert rec["theta_max"] == pytest.approx(0.0571910, abs=1e-7)


def test_ema_poisson_csv(capsys):
    code, out, _ = run(capsys, "ema", "--poisson", "6", "--cin-minus-cout", "8", "--trunc-eps", "5e-5",
                       "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(out.splitlines()))
    assert row["phase"] == "D" and row["t_max"] == "18"
    assert float(row["lambda1"]) == pytest.approx(5.75438, abs=1e-4)


def test_sweep_command_and_override(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("ensemble = regular\nn = 200\nc = 3\naxis_min = 0.9\naxis_max = 1\nsteps = 2\nsamples = 2\n")
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", str(cfg), "--set", "theta=2", "--seed", "5", "-o", str(out))
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(raw.decode().splitlines()))
    assert len(rows) == 6 and {r["theta"] for r in rows} == {"2"}
    assert rows[0]["seed"] and rows[2]["sample_index"] == "-1"
    code, _, _ = run(capsys, "sweep", str(cfg), "--max-work", "1")
    assert code == 2


def test_phase_diagram_cells(tmp_path, capsys):
    out = tmp_path / "pd.csv"
    code, _, _ = run(capsys, "phase-diagram", "--poisson", "6", "-N", "20000", "--axis", "cin_minus_cout",
                     "--axis-min", "2", "--axis-max", "8", "--axis-steps", "2",
                     "--theta-min", "0.01", "--theta-max", "1", "--theta-steps", "2", "-o", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    cells = {(round(float(r["gamma_struct"]) * 12, 9), r["theta"]): r["phase"] for r in rows}
    assert cells[(2.0, "0.01")] == "N"
    assert cells[(8.0, "1")] == "D"
    assert cells[(2.0, "1")] == "U"
    meta = json.loads((tmp_path / "pd.csv.meta.json").read_text())
    assert meta["trunc_eps"] == 5e-5


def test_phase_diagram_regular_extras_json(capsys):
    code, out, _ = run(capsys, "phase-diagram", "--regular", "3", "--axis-min", "1", "--axis-max", "1",
                       "--axis-steps", "1", "--theta-min", "1", "--theta-max", "1", "--theta-steps", "1",
                       "--extras", "--format", "json")
    rec = json.loads(out)[0]
    assert code == 0 and rec["phase"] == "D" and rec["lambda1"] == pytest.approx(3.0)
    assert rec["cheeger_lower_bound_theta"] == pytest.approx(0.0, abs=1e-12)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "specphase.cli", "ema", "--regular", "4", "--thresholds"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["gamma_star"] == pytest.approx(1 / math.sqrt(3))
