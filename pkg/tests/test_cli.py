"""CLI: argument parsing, file outputs, exit codes, determinism."""

import json
import os

import pytest

from trawlkit.cli import main, parse_seed_spec, parse_trawl_spec


class TestSpecParsing:
    def test_seed_tags(self):
        assert parse_seed_spec("poisson").kind == "poisson"
        assert parse_seed_spec("line:sigma_xi2=2.5").sigma_xi2 == 2.5
        assert parse_seed_spec("mixed-poisson:rate=2").mixing.mean == 0.5

    def test_trawl_tags(self):
        t = parse_trawl_spec("power-law:c0=2,alpha=1.3")
        assert (t.c0, t.alpha) == (2.0, 1.3)
        assert parse_trawl_spec("geometric:a=0.25").a == 0.25
        assert parse_trawl_spec("custom:values=0.8|0.2").value(1) == 0.2

    def test_bad_specs(self):
        from trawlkit.experiments import ConfigError

        with pytest.raises(ConfigError):
            parse_seed_spec("nope")
        with pytest.raises(ConfigError):
            parse_trawl_spec("power-law:alpha")  # key without value
        with pytest.raises(ConfigError):
            parse_trawl_spec("geometric")  # missing required a


class TestSimulateCommand:
    def test_writes_csv_and_sidecar(self, tmp_path):
        out = tmp_path / "path.csv"
        code = main(
            [
                "simulate",
                "--seed", "poisson",
                "--trawl", "power-law:c0=1,alpha=1.5",
                "--n", "1000",
                "--master-seed", "5",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,x"
        assert len(lines) == 1001
        # jump seed: integer x column
        for line in lines[1:20]:
            k, x = line.split(",")
            int(k), int(x)
        sidecar = json.loads((tmp_path / "path.csv.json").read_text())
        assert sidecar["past_horizon_used"] == -1

    def test_deterministic_output(self, tmp_path):
        args = [
            "simulate", "--seed", "bm", "--trawl", "geometric:a=0.5",
            "--n", "500", "--master-seed", "9",
        ]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_bernoulli_domain_exit_2(self, tmp_path):
        code = main(
            [
                "simulate", "--seed", "bernoulli",
                "--trawl", "power-law:c0=1.5,alpha=1.5",
                "--n", "10", "--out", str(tmp_path / "x.csv"),
            ]
        )
        assert code == 2

    def test_env_master_seed(self, tmp_path, monkeypatch):
        args = [
            "simulate", "--seed", "poisson", "--trawl", "geometric:a=0.5",
            "--n", "200",
        ]
        monkeypatch.setenv("TRAWLKIT_MASTER_SEED", "123")
        out1 = tmp_path / "env.csv"
        assert main(args + ["--out", str(out1)]) == 0
        monkeypatch.delenv("TRAWLKIT_MASTER_SEED")
        out2 = tmp_path / "flag.csv"
        assert main(args + ["--master-seed", "123", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestTheoryCommand:
    def test_long_memory_constants(self, capsys):
        assert main(["theory", "--seed", "poisson", "--trawl", "power-law:c0=1,alpha=1.5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["regime"] == "long-memory"
        assert data["c1"] == pytest.approx(2.0)
        assert data["c2"] == pytest.approx(16.0 / 3.0, rel=1e-4)
        assert data["H"] == pytest.approx(0.75)

    def test_short_memory_sigma2(self, capsys):
        assert main(["theory", "--seed", "bm", "--trawl", "geometric:a=0.5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["regime"] == "short-memory"
        assert data["sigma2"] == pytest.approx(6.0)

    def test_alpha_out_of_range_exit_2(self):
        assert main(["theory", "--seed", "poisson", "--trawl", "power-law:c0=1,alpha=2.5"]) == 2


class TestConditionsCommand:
    def test_regime_output(self, capsys):
        assert main(["conditions", "--seed", "poisson", "--trawl", "power-law:c0=1,alpha=1.5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["regime"] == "long-memory"
        assert data["weighted_summable"] is False


class TestAcfCommand:
    def test_writes_table(self, tmp_path):
        out = tmp_path / "acf.csv"
        code = main(
            [
                "acf", "--seed", "poisson", "--trawl", "geometric:a=0.5",
                "--n", "5000", "--max-lag", "3", "--master-seed", "2",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "lag,empirical,analytic"
        assert len(lines) == 5
        lag0 = lines[1].split(",")
        assert float(lag0[2]) == pytest.approx(2.0)


class TestExperimentCommand:
    def write_config(self, tmp_path, **overrides):
        cfg = {
            "experiment": "VarianceScaling",
            "seed_model": {"kind": "poisson"},
            "trawl": {"kind": "power-law", "c0": 1.0, "alpha": 1.5},
            "n": 256,
            "replicas": 200,
            "n_grid": [64, 128, 256],
            "master_seed": 3,
        }
        cfg.update(overrides)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_passing_run_exit_0(self, tmp_path, capsys):
        out_json = tmp_path / "report.json"
        out_csv = tmp_path / "report.csv"
        cfg = self.write_config(
            tmp_path, output_json=str(out_json), output_csv=str(out_csv)
        )
        assert main(["experiment", "--config", str(cfg)]) == 0
        report = json.loads(out_json.read_text())
        assert report["passed"] is True
        rows = out_csv.read_text().splitlines()
        assert rows[0] == "replica,n,statistic,value"
        capsys.readouterr()

    def test_impossible_tolerance_exit_1(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, tolerances={"slope_band": 0.0, "level_band": 0.0})
        assert main(["experiment", "--config", str(cfg)]) == 1
        capsys.readouterr()

    def test_bad_config_exit_2(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["experiment", "--config", str(path)]) == 2

    def test_regime_mismatch_exit_2(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, experiment="StableLimit", seed_model={"kind": "bm"})
        assert main(["experiment", "--config", str(cfg)]) == 2
        capsys.readouterr()

    def test_worker_flag_determinism(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path)
        assert main(["experiment", "--config", str(cfg), "--workers", "1"]) == 0
        rep1 = json.loads(capsys.readouterr().out)
        assert main(["experiment", "--config", str(cfg), "--workers", "2"]) == 0
        rep2 = json.loads(capsys.readouterr().out)
        rep1.pop("wall_clock_seconds")
        rep2.pop("wall_clock_seconds")
        assert rep1 == rep2


class TestParsing:
    def test_unknown_flag_exit_2(self):
        assert main(["theory", "--seed", "poisson", "--trawl", "geometric:a=0.5", "--bogus"]) == 2

    def test_help_exit_0(self, capsys):
        assert main(["--help"]) == 0
        assert "simulate" in capsys.readouterr().out

    def test_subcommand_help_exit_0(self, capsys):
        for sub in ("simulate", "theory", "acf", "experiment", "conditions"):
            assert main([sub, "--help"]) == 0
            capsys.readouterr()
