import json
import os

import pytest

from iabsim import ConfigError, ScenarioConfig
from iabsim.cli import (
    CSV_HEADER,
    EXIT_CONFIG,
    EXIT_ESTIMATION,
    EXIT_IO,
    EXIT_OK,
    canonical_scenario,
    main,
    parse_scenario,
)

TINY = {
    "density.mbs_per_km2": 2.0,
    "density.sbs_per_km2": 8.0,
    "density.ue_per_km2": 40.0,
    "blocking.density_per_km2": 60.0,
    "bandwidth.mu": 0.3,
    "run.realizations": 2,
    "run.master_seed": 7,
}


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


class TestParseScenario:
    def test_empty_file_gives_table_defaults(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        cfg = parse_scenario(str(path))
        assert cfg == ScenarioConfig()
        assert cfg.carrier_ghz == 28.0
        assert cfg.bandwidth_hz == 1e9
        assert cfg.rate_threshold_bps == 100e6
        assert (cfg.mbs_density, cfg.sbs_density, cfg.ue_density) == (8.0, 100.0, 500.0)
        assert (cfg.wall_density, cfg.wall_length) == (500.0, 5.0)
        assert (cfg.alpha_los, cfg.alpha_nlos) == (2.0, 3.0)
        assert (cfg.bs_main_gain_dbi, cfg.bs_side_gain_dbi, cfg.ue_gain_dbi) == (24.0, -2.0, 0.0)
        assert (cfg.hpbw_az_deg, cfg.hpbw_el_deg) == (60.0, 25.0)
        assert (cfg.mbs_height, cfg.sbs_height, cfg.ue_height) == (25.0, 10.0, 1.0)

    def test_out_of_range_mu(self, tmp_path):
        path = write_scenario(tmp_path, {"bandwidth.mu": 1.4})
        with pytest.raises(ConfigError, match="mu"):
            parse_scenario(path)

    def test_unknown_key_reports_name_and_line(self, tmp_path):
        path = write_scenario(tmp_path, {"density.sbs": 1.0})
        with pytest.raises(ConfigError) as err:
            parse_scenario(path)
        assert "density.sbs" in str(err.value)
        assert "line" in str(err.value)

    def test_wrong_type_reports_key(self, tmp_path):
        path = write_scenario(tmp_path, {"density.sbs_per_km2": "many"})
        with pytest.raises(ConfigError, match="density.sbs_per_km2"):
            parse_scenario(path)

    def test_range_error_names_key_and_line(self, tmp_path):
        path = write_scenario(tmp_path, {"density.sbs_per_km2": -4.0})
        with pytest.raises(ConfigError) as err:
            parse_scenario(path)
        assert "density.sbs_per_km2" in str(err.value)
        assert "line" in str(err.value)

    def test_mu_optimize_token(self, tmp_path):
        path = write_scenario(tmp_path, {"bandwidth.mu": "optimize"})
        cfg = parse_scenario(path)
        assert cfg.mu_optimize

    def test_round_trip(self, tmp_path):
        path = write_scenario(tmp_path, dict(TINY, **{"rain.rate_mm_hr": 12.5, "mode": "2d"}))
        cfg = parse_scenario(path)
        path2 = write_scenario(tmp_path, canonical_scenario(cfg), name="canon.json")
        assert parse_scenario(path2) == cfg

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            parse_scenario(str(path))


class TestMain:
    def run_cli(self, *argv):
        return main(list(argv))

    def test_run_writes_csv_and_sidecar(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        assert self.run_cli("run", "--scenario", scenario, "--out", str(out)) == EXIT_OK
        csv_path = out / "results.csv"
        lines = csv_path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2
        meta = json.loads((out / "results.meta.json").read_text())
        assert meta["tool"] == "iabsim"
        assert meta["scenario"]["run.master_seed"] == 7
        assert "version" in meta

    def test_rerun_byte_identical(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        self.run_cli("run", "--scenario", scenario, "--out", str(out1))
        self.run_cli("run", "--scenario", scenario, "--out", str(out2))
        assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()

    def test_sweep_rows_in_order(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        code = self.run_cli(
            "sweep", "--scenario", scenario, "--axis", "mu",
            "--values", "0.6,0.2,0.4", "--out", str(out),
        )
        assert code == EXIT_OK
        rows = (out / "results.csv").read_text().splitlines()[1:]
        assert [r.split(",")[0] for r in rows] == ["0.6", "0.2", "0.4"]

    def test_sweep_unknown_axis_exit_config(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        code = self.run_cli(
            "sweep", "--scenario", scenario, "--axis", "carrier", "--values", "1",
            "--out", str(tmp_path / "o"),
        )
        assert code == EXIT_CONFIG

    def test_optimize_mu_command(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        code = self.run_cli(
            "optimize-mu", "--scenario", scenario, "--grid", "0.2,0.5",
            "--out", str(out),
        )
        assert code == EXIT_OK
        meta = json.loads((out / "results.meta.json").read_text())
        assert meta["optimized_mu"] in (0.2, 0.5)
        rows = (out / "results.csv").read_text().splitlines()[1:]
        assert len(rows) == 1

    def test_config_error_exit(self, tmp_path):
        scenario = write_scenario(tmp_path, {"bandwidth.mu": 2.0})
        assert self.run_cli("run", "--scenario", scenario, "--out", str(tmp_path / "o")) == EXIT_CONFIG

    def test_missing_scenario_exit_io(self, tmp_path):
        code = self.run_cli(
            "run", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")
        )
        assert code == EXIT_IO

    def test_estimation_failure_exit(self, tmp_path):
        doc = dict(TINY, **{"count.ue": 0})
        scenario = write_scenario(tmp_path, doc)
        code = self.run_cli("run", "--scenario", scenario, "--out", str(tmp_path / "o"))
        assert code == EXIT_ESTIMATION

    def test_seed_flag_overrides_file(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        self.run_cli("run", "--scenario", scenario, "--out", str(out), "--seed", "99")
        meta = json.loads((out / "results.meta.json").read_text())
        assert meta["scenario"]["run.master_seed"] == 99

    def test_env_seed_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IABSIM_SEED", "1234")
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        self.run_cli("run", "--scenario", scenario, "--out", str(out), "--seed", "99")
        meta = json.loads((out / "results.meta.json").read_text())
        assert meta["scenario"]["run.master_seed"] == 1234

    def test_json_format(self, tmp_path):
        scenario = write_scenario(tmp_path, TINY)
        out = tmp_path / "out"
        self.run_cli("run", "--scenario", scenario, "--out", str(out), "--format", "json")
        doc = json.loads((out / "results.json").read_text())
        assert doc["tool"] == "iabsim"
        assert len(doc["rows"]) == 1
        assert 0.0 <= doc["rows"][0]["coverage"] <= 1.0

    def test_mu_optimize_scenario_run(self, tmp_path):
        doc = dict(TINY)
        doc["bandwidth.mu"] = "optimize"
        doc["run.realizations"] = 1
        scenario = write_scenario(tmp_path, doc)
        out = tmp_path / "out"
        assert self.run_cli("run", "--scenario", scenario, "--out", str(out)) == EXIT_OK
        meta = json.loads((out / "results.meta.json").read_text())
        assert "optimized_mu" in meta
