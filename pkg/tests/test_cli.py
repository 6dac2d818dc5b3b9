import os

import numpy as np
import pytest

from nmchaos.cli import main
from nmchaos.csvio import read_columns_csv


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def free_oscillator_cfg(tmp_path):
    return write(tmp_path / "free.toml", """
[system]
g1 = 0.0
g2 = 0.0
kappa1 = 0.0
kappa2 = 0.0
[initial]
q1 = 1.0
q2 = 0.0
p1 = 0.0
p2 = 0.0
n = 0.0
[integration]
t_max = 20.0
dt_out = 0.05
""")


class TestSimulate:
    def test_cosine_trajectory_and_echo(self, free_oscillator_cfg, tmp_path):
        out = str(tmp_path / "traj.csv")
        assert main(["simulate", "--config", free_oscillator_cfg,
                     "--out", out]) == 0
        cols = read_columns_csv(out)
        assert np.abs(cols["q1"] - np.cos(2 * cols["t"])).max() < 1e-7
        assert os.path.exists(out + ".config.toml")

    def test_byte_identical_reruns(self, free_oscillator_cfg, tmp_path):
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        main(["simulate", "--config", free_oscillator_cfg, "--out", out1])
        main(["simulate", "--config", free_oscillator_cfg, "--out", out2])
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_header_schema(self, free_oscillator_cfg, tmp_path):
        out = str(tmp_path / "traj.csv")
        main(["simulate", "--config", free_oscillator_cfg, "--out", out])
        head = open(out).readline().strip()
        assert head == ("t,q1,q2,p1,p2,n,ReF1,ImF1,ReF2,ImF2,ReF3,ImF3,"
                        "ReF4,ImF4,ReF5,ImF5")


class TestExitCodes:
    def test_validation_error_is_1(self, tmp_path):
        cfg = write(tmp_path / "bad.toml", "[environment]\ngamma = -2\n")
        assert main(["simulate", "--config", cfg,
                     "--out", str(tmp_path / "x.csv")]) == 1

    def test_unknown_key_is_1_strict_and_0_lenient(self, tmp_path):
        cfg = write(tmp_path / "typo.toml",
                    "[integration]\nt_max = 5.0\ngamma = 1.0\n")
        out = str(tmp_path / "x.csv")
        assert main(["simulate", "--config", cfg, "--out", out]) == 1
        assert main(["--lenient", "simulate", "--config", cfg,
                     "--out", out]) == 0

    def test_usage_error_is_64(self, capsys):
        assert main(["simulate", "--config"]) == 64
        assert main(["frobnicate"]) == 64

    def test_numerical_failure_is_2(self, tmp_path):
        # aliased oracle grid triggers the coarse-grid failure
        cfg = write(tmp_path / "c.toml", "[environment]\nbig_omega = 120.0\n")
        assert main(["oracle", "--config", cfg, "--tmax", "5.0",
                     "--ns", "64", "--out", str(tmp_path / "o.csv")]) == 2

    def test_no_partial_file_on_failure(self, tmp_path):
        cfg = write(tmp_path / "c.toml", "[environment]\nbig_omega = 120.0\n")
        out = tmp_path / "o.csv"
        main(["oracle", "--config", cfg, "--tmax", "5.0", "--ns", "64",
              "--out", str(out)])
        assert not out.exists()


class TestLe:
    def test_wolf_from_trajectory_csv(self, tmp_path):
        cfg = write(tmp_path / "fig2.toml", "[integration]\nt_max = 60.0\n")
        traj = str(tmp_path / "traj.csv")
        main(["simulate", "--config", cfg, "--out", traj])
        out = str(tmp_path / "le.csv")
        assert main(["le", "--input", traj, "--column", "q1",
                     "--method", "wolf", "--out", out]) == 0
        cols = read_columns_csv(out)
        assert set(cols) == {"t", "lambda_running", "events_so_far"}
        assert cols["events_so_far"][-1] >= 1

    def test_wolf_missing_column_is_1(self, tmp_path):
        cfg = write(tmp_path / "fig2.toml", "[integration]\nt_max = 10.0\n")
        traj = str(tmp_path / "traj.csv")
        main(["simulate", "--config", cfg, "--out", traj])
        assert main(["le", "--input", traj, "--column", "bogus",
                     "--method", "wolf", "--out", str(tmp_path / "x.csv")]) \
            == 1

    def test_benettin_from_flow_config(self, tmp_path):
        cfg = write(tmp_path / "flow.toml", """
[integration]
t_max = 40.0
[lyapunov]
renorm_dt = 0.5
""")
        out = str(tmp_path / "le.csv")
        assert main(["le", "--input", cfg, "--column", "q1",
                     "--method", "benettin", "--out", out]) == 0
        cols = read_columns_csv(out)
        # weakly damped coupled system: exponent close to zero, not wild
        assert abs(cols["lambda_running"][-1]) < 0.5


class TestSweep:
    def test_fig5_tiny_grid(self, tmp_path):
        cfg = write(tmp_path / "s.toml", """
[sweep]
kappa1_values = [0.5]
kappa2_values = [0.5, 1.5]
""")
        out = str(tmp_path / "grid.csv")
        assert main(["sweep", "--figure", "fig5", "--config", cfg,
                     "--out", out]) == 0
        head = open(out).readline().strip()
        assert head == ("axis1_name,axis1_value,axis2_name,axis2_value,"
                        "t_or_window,observable,lambda,failed,error")
        body = open(out).read().splitlines()[1:]
        assert len(body) == 2
        assert all(line.split(",")[4] == "5:20" for line in body)

    def test_fig2_long_format(self, tmp_path):
        cfg = write(tmp_path / "s.toml",
                    "[sweep]\ntau_values = [1.0]\nt_max = 25.0\n")
        out = str(tmp_path / "grid.csv")
        assert main(["sweep", "--figure", "fig2", "--config", cfg,
                     "--out", out]) == 0
        cols = open(out).readline().strip().split(",")
        assert cols == ["axis1_name", "axis1_value", "t_or_window",
                        "observable", "lambda", "failed", "error"]

    def test_fig3_tdc_observables(self, tmp_path):
        cfg = write(tmp_path / "s.toml",
                    "[sweep]\ntau_values = [1.0]\nt_max = 25.0\n")
        out = str(tmp_path / "grid.csv")
        assert main(["sweep", "--figure", "fig3", "--config", cfg,
                     "--out", out]) == 0
        obs = {line.split(",")[3] for line in
               open(out).read().splitlines()[1:]}
        assert obs == {f"ReF{i}" for i in range(1, 6)}

    def test_threads_env_override(self, tmp_path, monkeypatch):
        cfg = write(tmp_path / "s.toml",
                    "[sweep]\ntau_values = [0.5, 4.0]\nt_max = 25.0\n")
        out1 = str(tmp_path / "g1.csv")
        out2 = str(tmp_path / "g2.csv")
        main(["sweep", "--figure", "fig2", "--config", cfg, "--out", out1])
        monkeypatch.setenv("NMCHAOS_THREADS", "2")
        main(["sweep", "--figure", "fig2", "--config", cfg, "--out", out2])
        assert open(out1).read() == open(out2).read()


class TestOracle:
    def test_oracle_csv_errors_small(self, tmp_path):
        cfg = write(tmp_path / "c.toml", "")
        out = str(tmp_path / "oracle.csv")
        assert main(["oracle", "--config", cfg, "--tmax", "5.0",
                     "--ns", "512", "--out", out]) == 0
        cols = read_columns_csv(out)
        assert "ReF1_oracle" in cols and "err5" in cols
        for i in range(1, 6):
            assert cols[f"err{i}"].max() <= 1e-4


class TestSeedless:
    def test_flag_is_accepted_and_asserts(self, free_oscillator_cfg,
                                          tmp_path, capsys):
        out = str(tmp_path / "t.csv")
        assert main(["--seedless", "simulate", "--config",
                     free_oscillator_cfg, "--out", out]) == 0
        assert "no randomness" in capsys.readouterr().err
