import csv
import json

import pytest

from fracgrad.cli import main

SMALL = ["--synth-length", "600", "--synth-features", "3", "--window", "12", "--horizon", "8",
         "--batch", "32", "--hidden", "16", "--iters", "25", "--lr", "1e-2"]


def test_train_writes_artifacts_and_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        rc = main(["train", "--data", "synth:smooth", "--alpha", "0.9", *SMALL, "--quiet",
                   "--out", str(tmp_path / name)])
        assert rc == 0
    for f in ("history.csv", "metrics.json", "model.bin"):
        assert (tmp_path / "a" / f).exists()
    assert (tmp_path / "a" / "history.csv").read_bytes() == (tmp_path / "b" / "history.csv").read_bytes()
    out = capsys.readouterr().out
    assert "test MSE" in out and "test MAE" in out


def test_eval_reproduces_metrics(tmp_path, capsys):
    run = tmp_path / "r"
    assert main(["train", "--data", "synth:spiky", "--alpha", "0.8", *SMALL, "--quiet", "--out", str(run)]) == 0
    capsys.readouterr()
    assert main(["eval", "--run", str(run)]) == 0
    got = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    meta = json.loads((run / "metrics.json").read_text())
    assert got["test_mse"] == pytest.approx(meta["test_mse"], rel=1e-12, abs=1e-12)
    assert got["test_mae"] == pytest.approx(meta["test_mae"], rel=1e-12, abs=1e-12)


def test_env_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACGRAD_SEED", "123")
    assert main(["train", *SMALL, "--quiet", "--out", str(tmp_path / "r")]) == 0
    assert json.loads((tmp_path / "r" / "metrics.json").read_text())["seed"] == 123


def test_train_csv_source(tmp_path):
    from fracgrad.data import synth_series

    fr = synth_series("smooth", 600, 3, 0)
    p = tmp_path / "d.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", *fr.columns])
        for i, row in enumerate(fr.values):
            w.writerow([f"t{i}", *row.tolist()])
    assert main(["train", "--data", str(p), "--label", "OT", *SMALL, "--quiet", "--out", str(tmp_path / "r")]) == 0
    assert main(["train", "--data", str(p), "--label", "Close", *SMALL, "--quiet", "--out", str(tmp_path / "r")]) == 2


@pytest.mark.parametrize("argv", [["train", "--alpha", "1.5"], ["train", "--alpha", "0"],
                                  ["train", "--lr", "-1"], ["demo", "spiral"], ["bogus"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_divergence_exit_3(tmp_path, capsys):
    rc = main(["train", "--alpha", "0.3", *SMALL[:-2], "--lr", "1e3", "--iters", "200", "--quiet",
               "--out", str(tmp_path / "r")])
    assert rc == 3
    assert "alpha=0.3" in capsys.readouterr().err


def test_verify_default_passes(capsys):
    assert main(["verify", "--cases", "200"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4


def test_verify_grid_and_determinism(capsys):
    assert main(["verify", "--cases", "50", "--seed", "7", "--alpha-grid", "0.3,0.7,1.0"]) == 0
    first = capsys.readouterr().out
    assert "alpha grid: 0.3,0.7,1.0" in first
    assert main(["verify", "--cases", "50", "--seed", "7", "--alpha-grid", "0.3,0.7,1.0"]) == 0
    assert capsys.readouterr().out == first


def test_verify_failure_exit_1(monkeypatch, capsys):
    from fracgrad import verify

    monkeypatch.setattr(verify, "oracle_equivalence",
                        lambda *a, **k: verify.SuiteResult("oracle-equivalence", False, 1.0, 1e-10))
    assert main(["verify", "--cases", "10"]) == 1
    assert "oracle-equivalence" in capsys.readouterr().err


def test_demo_trajectory_csv(tmp_path):
    assert main(["demo", "trajectory", "--alpha", "0.5", "--eta", "0.1", "--steps", "20", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "demo_trajectory.csv")))
    assert rows[0] == ["k", "x1", "x2", "y"]
    assert len(rows) == 22
    assert [float(v) for v in rows[1][1:3]] == [-3.5, -4.7]


def test_demo_saddle_and_decomposition(tmp_path):
    assert main(["demo", "saddle", "--alpha", "0.5", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "demo_saddle.csv")))
    assert rows[0] == ["x", "y", "gx_int", "gy_int", "gx_frac", "gy_frac"] and len(rows) == 122
    assert main(["demo", "decomposition", "--alpha", "0.7", "--samples", "20", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "demo_decomposition.csv")))
    assert len(rows) == 20
    for r in rows:
        assert float(r["J1_prime"]) + float(r["p1_prime"]) == pytest.approx(float(r["total"]), rel=1e-15)


def test_bench_rows_and_equal_memory(tmp_path):
    assert main(["bench", "--alphas", "0.9,1.0", "--synth-length", "600", "--synth-features", "3",
                 "--window", "12", "--horizon", "8", "--batch", "32", "--hidden", "16", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "bench.csv")))
    assert [r["alpha"] for r in rows] == ["0.9", "1.0"]
    assert rows[0]["peak_buffer_bytes"] == rows[1]["peak_buffer_bytes"]
    assert all(float(r["secs"]) > 0 for r in rows)
