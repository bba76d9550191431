import json
import math
import subprocess
import sys

import pytest

from biasedci.cli import main, parse_grid
from biasedci.errors import DomainError
from biasedci.io import read_csv, to_csv_string
from biasedci.montecarlo import SimulationResult


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCp:
    def test_grid_and_worst_row(self, capsys):
        code, out, _ = run(capsys, "cp", "--level", "0.95", "--t-grid", "501")
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 502
        assert sum(r["row"] == "grid" for r in rows) == 501
        assert min(r["cp"] for r in rows) >= 0.95 - 1e-12

    def test_low_level(self, capsys):
        _, out, _ = run(capsys, "cp", "--level", "0.68", "--t-grid", "501")
        rows = [r for r in read_csv(out) if r["row"] == "grid"]
        worst = min(rows[:-1], key=lambda r: r["cp"])
        assert worst["cp"] < 0.05
        assert worst["t"] > 1.5

    def test_two_points(self, capsys):
        _, out, _ = run(capsys, "cp", "--z", "1.0", "--t-grid", "2")
        rows = read_csv(out)
        assert rows[0]["t"] == 0 and rows[0]["cp"] == pytest.approx(0.682689492137086, abs=1e-14)
        assert rows[1]["t"] == pytest.approx(math.pi / 2) and rows[1]["cp"] == 1

    def test_combination(self, capsys):
        code, out, _ = run(capsys, "cp", "--z", "1.5", "--w", "0.5", "--rho", "0.1",
                           "--t-grid", "11")
        assert code == 0 and len(read_csv(out)) == 12

    @pytest.mark.parametrize("argv", [
        ("cp",), ("cp", "--z", "1", "--level", "0.9"), ("cp", "--z", "1", "--t-grid", "1"),
        ("cp", "--z", "-1"), ("cp", "--z", "1", "--w", "0.5"),
        ("cp", "--level", "1.5"),
    ])
    def test_usage(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestCalibrate:
    def test_worked_example(self, capsys):
        code, out, _ = run(capsys, "calibrate", "--s1", "1", "--s2", "0.5", "--level", "0.95")
        assert code == 0
        rec = json.loads(out)
        assert rec["z_tilde"] == pytest.approx(1.69, abs=5e-3)
        assert rec["bias_bound"] == pytest.approx(math.sqrt(0.75))

    def test_optimize(self, capsys):
        _, out, _ = run(capsys, "calibrate", "--s1", "1", "--s2", "1", "--rho", "0.1",
                        "--optimize-w", "--level", "0.95")
        rec = json.loads(out)
        assert rec["ratio_vs_w1"] == pytest.approx(0.74, abs=5e-3)
        assert rec["w"] == pytest.approx(0.5, abs=1e-3)

    def test_fixed_w(self, capsys):
        _, out, _ = run(capsys, "calibrate", "--s1", "1", "--s2", "1", "--rho", "0.1",
                        "--w", "0.5", "--level", "0.95")
        assert json.loads(out)["z_tilde"] == pytest.approx(1.959964 * math.sqrt(0.55), abs=1e-6)

    def test_scale_invariance(self, capsys):
        a = json.loads(run(capsys, "calibrate", "--s1", "2", "--s2", "1", "--level", "0.95")[1])
        b = json.loads(run(capsys, "calibrate", "--s1", "1", "--s2", "0.5", "--level", "0.95")[1])
        assert a["z_tilde"] == b["z_tilde"]

    def test_violation(self, capsys):
        code, _, err = run(capsys, "calibrate", "--s1", "1", "--s2", "2", "--level", "0.95")
        assert code == 3
        assert "assumption" in err

    def test_missing_rho(self, capsys):
        assert run(capsys, "calibrate", "--s1", "1", "--s2", "1", "--optimize-w",
                   "--level", "0.95")[0] == 2

    def test_csv(self, capsys):
        _, out, _ = run(capsys, "calibrate", "--s1", "1", "--s2", "0.5", "--level", "0.95",
                        "--format", "csv")
        rec = read_csv(out)[0]
        assert rec["z_tilde"] == pytest.approx(1.69, abs=5e-3)
        assert rec["degenerate"] is False


class TestCi:
    def test_same_width(self, capsys):
        _, out, _ = run(capsys, "ci", "--theta1", "0", "--theta2", "1", "--s1", "1",
                        "--kinds", "CI1,CI2")
        a, b = json.loads(out)
        assert a["half_width"] == b["half_width"]

    def test_ci5(self, capsys):
        _, out, _ = run(capsys, "ci", "--theta2", "0", "--s1", "1", "--s2", "0.5",
                        "--level", "0.95", "--kinds", "CI5", "--format", "csv")
        row = read_csv(out)[0]
        assert row["lower"] == pytest.approx(-1.69, abs=5e-3)
        assert row["upper"] == pytest.approx(1.69, abs=5e-3)

    def test_shrink_fixed_point(self, capsys):
        base = ["ci", "--theta1", "0.2", "--theta2", "0.5", "--s1", "1", "--s2", "0.6",
                "--rho", "1", "--kinds", "CI6"]
        a = json.loads(run(capsys, *base)[1])[0]
        b = json.loads(run(capsys, *base, "--shrink-rho")[1])[0]
        assert b["kind"] == "CI6S"
        assert (a["center"], a["half_width"]) == (b["center"], b["half_width"])

    def test_violation_and_clip(self, capsys):
        base = ["ci", "--theta2", "0", "--s1", "1", "--s2", "1.5", "--kinds", "CI5"]
        assert run(capsys, *base)[0] == 3
        code, out, _ = run(capsys, *base, "--clip")
        assert code == 0
        assert json.loads(out)[0]["diagnostics"]["clipped"] is True

    @pytest.mark.parametrize("argv", [
        ("ci", "--s1", "1", "--kinds", "CI5", "--theta2", "0"),
        ("ci", "--s1", "1", "--kinds", "CI9", "--theta1", "0"),
        ("ci", "--s1", "0", "--kinds", "CI1", "--theta1", "0"),
        ("ci", "--s1", "1", "--s2", "0.5", "--theta1", "0", "--theta2", "0", "--kinds", "CI6"),
    ])
    def test_domain(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestLengths:
    def test_table(self, capsys):
        _, out, _ = run(capsys, "lengths", "--level", "0.95", "--s2-grid", "0.1,0.5,1",
                        "--rho-grid", "0.1")
        rows = {r["s2_over_s1"]: r for r in read_csv(out)}
        assert rows[1]["ratio_ci5"] == 1
        assert rows[1]["ratio_ci6"] == pytest.approx(0.74, abs=5e-3)
        assert rows[0.1]["ratio_ci5"] < 0.6

    def test_default_grid(self, capsys):
        _, out, _ = run(capsys, "lengths", "--level", "0.95")
        rows = read_csv(out)
        assert len(rows) == 20 and rows[0]["ratio_ci6"] is None

    def test_bad_grid(self, capsys):
        assert run(capsys, "lengths", "--s2-grid", "0:1")[0] == 2


class TestSimulate:
    def test_joint_normal(self, capsys):
        _, out, _ = run(capsys, "simulate", "--b2", "0.5", "--s1", "1", "--s2", "0.5",
                        "--reps", "1000000", "--kinds", "CI2", "--seed", "1")
        row = read_csv(out)[0]
        assert row["coverage"] == pytest.approx(0.998, abs=1e-3)

    def test_single_rep(self, capsys):
        _, out, _ = run(capsys, "simulate", "--reps", "1", "--kinds", "CI2")
        row = read_csv(out)[0]
        assert row["coverage"] in (0, 1) and row["mc_stderr"] == 0

    def test_round_trip(self, capsys):
        _, out, _ = run(capsys, "simulate", "--b2", "0.3", "--s2", "0.9", "--rho", "0.5",
                        "--reps", "2000", "--kinds", "CI1,CI2,CI5,CI6")
        res = SimulationResult.from_rows(read_csv(out))
        assert to_csv_string(res.to_rows(), SimulationResult.RESULT_COLUMNS) == out

    def test_reproducible(self, capsys, monkeypatch):
        argv = ["simulate", "--b2", "0.2", "--s2", "0.9", "--reps", "5000"]
        monkeypatch.setenv("BIASEDCI_SEED", "99")
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        c = run(capsys, *argv, "--seed", "99")[1]
        d = run(capsys, *argv, "--seed", "100")[1]
        assert a == b == c
        assert a != d

    def test_bad_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("BIASEDCI_SEED", "abc")
        assert run(capsys, "simulate", "--reps", "10")[0] == 2

    def test_demo(self, capsys):
        code, out, _ = run(capsys, "simulate", "--mode", "demo", "--n", "50", "--reps", "4",
                           "--boot", "50", "--seed", "3")
        assert code == 0
        row = read_csv(out)[0]
        assert {"CI1_CP", "CI6S_median_length", "clip_rate"} <= set(row)
        assert row["tau_or_tag"] == "demo"

    @pytest.mark.parametrize("argv", [
        ("simulate", "--reps", "0"), ("simulate", "--b2", "2"),
        ("simulate", "--mode", "other"), ("simulate", "--seed", "-3", "--reps", "5"),
    ])
    def test_invalid(self, capsys, argv):
        assert run(capsys, *argv)[0] in (2, 3)

    def test_assumption_code(self, capsys):
        assert run(capsys, "simulate", "--s2", "1.5", "--reps", "5")[0] == 3


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t.csv"
    assert main(["lengths", "--s2-grid", "0.5,1", "--out", str(path)]) == 0
    text = path.read_bytes()
    assert b"\r" not in text and text.endswith(b"\n")
    assert text.splitlines()[0] == b"s2_over_s1,rho,ratio_ci5,ratio_ci6"


def test_summary_goes_to_stderr(capsys):
    _, out, err = run(capsys, "calibrate", "--s1", "1", "--s2", "0.5", "--summary")
    assert "z_tilde=1.68845" in err
    assert "z_tilde=" not in out.splitlines()[0]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "biasedci", "calibrate", "--s1", "1", "--s2",
                           "2"], capture_output=True, text=True)
    assert proc.returncode == 3
    proc = subprocess.run([sys.executable, "-m", "biasedci", "cp", "--z", "1", "--t-grid", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("row,t,cp\n")


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]
    for bad in ("a:b:c", "0:1:0", "x"):
        with pytest.raises(DomainError):
            parse_grid(bad)
