import json

import numpy as np
import pytest

from rtea.cli import main
from rtea.fileio import read_columns_csv, write_columns_csv


def run(args):
    return main([str(a) for a in args])


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture()
def generated(tmp_path):
    out = tmp_path / "gen"
    assert run(["generate", "--t1", 32, "--t2", 53, "--n", 1024,
                "--sigma", 0.5, "--seed", 7, "--out", out]) == 0
    return out


class TestGenerate:
    def test_files_and_shape(self, generated):
        cols = read_columns_csv(str(generated / "signal.csv"))
        assert set(cols) == {"index", "y", "x1_true", "x2_true", "w"}
        assert len(cols["y"]) == 1024
        manifest = json.loads((generated / "truth.json").read_text())
        assert manifest["seed"] == 7
        assert manifest["params"]["t1"] == 32
        assert len(manifest["onsets1"]) == 32
        np.testing.assert_allclose(
            cols["y"], cols["x1_true"] + cols["x2_true"] + cols["w"]
        )

    def test_replayable(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["generate", "--seed", 3, "--out", out]) == 0
        assert read_bytes(a / "signal.csv") == read_bytes(b / "signal.csv")

    def test_sigma_zero(self, tmp_path):
        out = tmp_path / "clean"
        assert run(["generate", "--sigma", 0, "--seed", 1, "--out", out]) == 0
        cols = read_columns_csv(str(out / "signal.csv"))
        np.testing.assert_array_equal(cols["y"], cols["x1_true"] + cols["x2_true"])
        np.testing.assert_array_equal(cols["w"], 0.0)

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RTEA_SEED", "11")
        out_env = tmp_path / "env"
        assert run(["generate", "--out", out_env]) == 0
        out_flag = tmp_path / "flag"
        assert run(["generate", "--seed", 11, "--out", out_flag]) == 0
        assert read_bytes(out_env / "signal.csv") == read_bytes(out_flag / "signal.csv")

    def test_default_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert run(["generate", "--n", 128, "--t2", 40]) == 0
        assert (tmp_path / "out" / "signal.csv").exists()

    def test_modulation_requires_fs(self, tmp_path, capsys):
        assert run(["generate", "--modulation-freq", 6, "--out", tmp_path / "g"]) == 2
        assert "sample_rate" in capsys.readouterr().err


class TestExtract:
    def test_end_to_end_improves_on_input(self, generated, tmp_path, capsys):
        out = tmp_path / "ext"
        assert run(["extract", generated / "signal.csv",
                    "--period1", 32, "--period2", 53, "--out", out]) == 0
        printed = capsys.readouterr().out
        assert "sigma_hat" in printed and "lambda0" in printed
        assert "convexity bound" in printed and "iterations" in printed
        manifest = json.loads((out / "manifest.json").read_text())
        m = manifest["metrics"]
        assert m["rmse_x1"] < m["baseline_rmse_y_x1"]
        assert m["rmse_x2"] < m["baseline_rmse_y_x2"]
        cols = read_columns_csv(str(out / "components.csv"))
        assert set(cols) == {"index", "x1", "x2", "residual"}
        cost = read_columns_csv(str(out / "cost.csv"))
        assert np.all(np.diff(cost["cost"]) <= 1e-12)

    def test_replay_byte_identical(self, generated, tmp_path):
        a, b = tmp_path / "ex1", tmp_path / "ex2"
        for out in (a, b):
            assert run(["extract", generated / "signal.csv",
                        "--period1", 32, "--period2", 53, "--out", out]) == 0
        assert read_bytes(a / "components.csv") == read_bytes(b / "components.csv")
        assert read_bytes(a / "cost.csv") == read_bytes(b / "cost.csv")

    def test_missing_periods_is_usage_error(self, generated, tmp_path, capsys):
        code = run(["extract", generated / "signal.csv", "--out", tmp_path / "x"])
        assert code == 2
        err = capsys.readouterr().err
        assert "prior information" in err

    def test_pogs_mode_single_component(self, generated, tmp_path):
        out = tmp_path / "pogs"
        assert run(["extract", generated / "signal.csv", "--mode", "pogs",
                    "--period1", 32, "--out", out]) == 0
        cols = read_columns_csv(str(out / "components.csv"))
        assert set(cols) == {"index", "x1", "residual"}

    def test_mca_mode(self, generated, tmp_path):
        out = tmp_path / "mca"
        assert run(["extract", generated / "signal.csv", "--mode", "mca",
                    "--period1", 32, "--period2", 53, "--out", out]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["lam0"] == 0.0

    def test_high_eta_warns(self, generated, tmp_path, capsys):
        out = tmp_path / "warn"
        assert run(["extract", generated / "signal.csv", "--period1", 32,
                    "--period2", 53, "--eta", 0.95, "--out", out]) == 0
        assert "warning" in capsys.readouterr().err

    def test_config_file(self, generated, tmp_path):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({
            "eta": 0.4,
            "period_samples": [32, 53],
            "n1": 3,
            "m": 4,
            "max_iter": 60,
        }))
        out = tmp_path / "cfg"
        assert run(["extract", generated / "signal.csv", "--config", cfg_path,
                    "--out", out]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["settings"]["eta"] == 0.4
        assert manifest["config"]["max_iter"] == 60

    def test_unknown_config_key(self, generated, tmp_path, capsys):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"period_samples": [32, 53], "volume": 11}))
        assert run(["extract", generated / "signal.csv", "--config", cfg_path,
                    "--out", tmp_path / "o"]) == 2
        assert "unknown config keys" in capsys.readouterr().err

    def test_frequency_flags(self, tmp_path):
        out_gen = tmp_path / "gen"
        assert run(["generate", "--t1", 128, "--t2", 160, "--n", 2048,
                    "--seed", 2, "--out", out_gen]) == 0
        out = tmp_path / "freq"
        assert run(["extract", out_gen / "signal.csv", "--freq1", 100,
                    "--freq2", 80, "--fs", 12800, "--out", out]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["periods"][0]["period_int"] == 128
        assert manifest["periods"][1]["period_int"] == 160

    def test_missing_input_is_io_error(self, tmp_path):
        assert run(["extract", tmp_path / "nope.csv", "--period1", 32,
                    "--period2", 53, "--out", tmp_path / "x"]) == 4

    @pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
    def test_overflowing_input_is_numerical_failure(self, tmp_path):
        n = 256
        y = 1e200 * np.random.default_rng(0).normal(size=n)
        write_columns_csv(str(tmp_path / "huge.csv"), {"y": y})
        assert run(["extract", tmp_path / "huge.csv", "--period1", 16,
                    "--period2", 25, "--out", tmp_path / "x"]) == 3

    def test_single_column_headerless_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        path = tmp_path / "raw.csv"
        path.write_text("\n".join(repr(float(v)) for v in rng.normal(size=256)) + "\n")
        out = tmp_path / "raw_out"
        assert run(["extract", path, "--period1", 16, "--period2", 25,
                    "--max-iter", 20, "--out", out]) == 0
        cols = read_columns_csv(str(out / "components.csv"))
        assert len(cols["x1"]) == 256


class TestAnalyze:
    def test_peaks_report(self, generated, tmp_path):
        out = tmp_path / "ext"
        assert run(["extract", generated / "signal.csv", "--period1", 32,
                    "--period2", 53, "--out", out]) == 0
        out_an = tmp_path / "an"
        fs = 12800.0
        assert run(["analyze", out / "components.csv", "--fs", fs,
                    "--band", 100, 2000, "--nfft", 8192, "--out", out_an]) == 0
        report = json.loads((out_an / "peaks.json").read_text())
        assert set(report["components"]) == {"x1", "x2"}
        f1 = report["components"]["x1"]["fundamental_hz"]
        assert f1 == pytest.approx(fs / 32, abs=2 * fs / 8192)
        for name in ("x1", "x2"):
            assert (out_an / f"spectrum_{name}.csv").exists()

    def test_plain_signal_column(self, tmp_path):
        fs = 1000.0
        t = np.arange(2000) / fs
        x = (1 + 0.6 * np.cos(2 * np.pi * 20 * t)) * np.sin(2 * np.pi * 250 * t)
        write_columns_csv(str(tmp_path / "y.csv"), {"y": x})
        out = tmp_path / "an"
        assert run(["analyze", tmp_path / "y.csv", "--fs", fs, "--band", 5, 100,
                    "--out", out]) == 0
        report = json.loads((out / "peaks.json").read_text())
        assert list(report["components"]) == ["y"]
        assert report["components"]["y"]["fundamental_hz"] == pytest.approx(20.0, abs=1.0)

    def test_plot_emission(self, generated, tmp_path):
        pytest.importorskip("matplotlib")
        out = tmp_path / "plots"
        assert run(["extract", generated / "signal.csv", "--period1", 32,
                    "--period2", 53, "--max-iter", 30, "--plot", "--out", out]) == 0
        assert (out / "components.svg").exists()
        assert (out / "cost.svg").exists()

    def test_empty_component_gives_empty_peaks(self, tmp_path):
        n = 512
        write_columns_csv(
            str(tmp_path / "components.csv"),
            {"index": np.arange(n), "x1": np.zeros(n), "x2": np.zeros(n)},
        )
        out = tmp_path / "an"
        assert run(["analyze", tmp_path / "components.csv", "--fs", 1000,
                    "--out", out]) == 0
        report = json.loads((out / "peaks.json").read_text())
        assert report["components"]["x1"]["peaks"] == []
        assert report["components"]["x1"]["fundamental_hz"] is None


class TestBenchEta:
    def test_sweep_csv(self, tmp_path):
        out_gen = tmp_path / "gen"
        assert run(["generate", "--n", 512, "--seed", 4, "--out", out_gen]) == 0
        out = tmp_path / "sweep"
        assert run(["bench-eta", out_gen / "signal.csv", "--period1", 32,
                    "--period2", 53, "--etas", "0.2,0.5,0.8",
                    "--max-iter", 60, "--out", out]) == 0
        cols = read_columns_csv(str(out / "eta_sweep.csv"))
        assert list(cols) == ["eta", "rmse_x1", "rmse_x2", "rmse_sum"]
        assert len(cols["eta"]) == 3

    def test_requires_truth(self, tmp_path):
        n = 128
        write_columns_csv(str(tmp_path / "y.csv"), {"y": np.random.default_rng(0).normal(size=n)})
        assert run(["bench-eta", tmp_path / "y.csv", "--period1", 16,
                    "--period2", 25, "--out", tmp_path / "s"]) == 2


def test_console_entrypoint_help():
    import subprocess, sys

    proc = subprocess.run(
        [sys.executable, "-m", "rtea", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "generate" in proc.stdout and "bench-eta" in proc.stdout
