import json

import pytest

from transit_access.cli import main
from transit_access.config import load_config
from transit_access.errors import ConfigError
from transit_access.fixtures import write_gridville


class TestFixturesCommand:
    def test_generates_input_tree(self, tmp_path, capsys):
        assert main(["fixtures", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "config.yaml").exists()
        assert (tmp_path / "gridville" / "gtfs" / "stops.txt").exists()
        assert (tmp_path / "gridville" / "pois.csv").exists()
        assert (tmp_path / "gridville" / "census.geojson").exists()
        assert "config.yaml" in capsys.readouterr().out


class TestBuildCommand:
    def test_build_writes_cache(self, gridville_dir, capsys):
        assert main(["build", "--config", str(gridville_dir / "config.yaml")]) == 0
        cache = gridville_dir / "cache" / "gridville"
        assert (cache / "demographics.csv").exists()
        assert (cache / "catchments_grocery_morning.ndjson").exists()
        assert (cache / "layer_grocery_morning.csv").exists()
        assert (cache / "reports_grocery_morning.json").exists()
        assert (cache / "summary.json").exists()

    def test_missing_config_exit_2(self, tmp_path, capsys):
        assert main(["build", "--config", str(tmp_path / "nope.yaml")]) == 2

    def test_bad_data_exit_1(self, tmp_path, capsys):
        write_gridville(tmp_path, seed=7)
        pois = tmp_path / "gridville" / "pois.csv"
        pois.write_text("id,category,name,lat,lon\nx1,bank,Bad,39.9,-83.0\n")
        assert main(["build", "--config", str(tmp_path / "config.yaml")]) == 1


class TestReportCommand:
    def test_prints_report_json(self, gridville_dir, capsys):
        code = main([
            "report", "--config", str(gridville_dir / "config.yaml"),
            "--city", "gridville", "--category", "grocery",
            "--window", "morning", "--dimension", "race",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dimension"] == "race"
        assert {b["name"] for b in payload["brackets"]} == {"white", "black", "asian", "other"}

    def test_unknown_city_exit_2(self, gridville_dir, capsys):
        code = main([
            "report", "--config", str(gridville_dir / "config.yaml"),
            "--city", "metropolis", "--category", "grocery",
            "--window", "morning", "--dimension", "race",
        ])
        assert code == 2


class TestConfig:
    def test_loads_generated_config(self, gridville_dir):
        cfg = load_config(gridville_dir / "config.yaml")
        assert cfg.cities[0].id == "gridville"
        assert cfg.windows["morning"].start_s == 7 * 3600
        assert cfg.router_params.max_walk_m == 800.0
        assert cfg.budget_s == 1800

    def test_relative_paths_resolve_against_config(self, gridville_dir):
        cfg = load_config(gridville_dir / "config.yaml")
        assert cfg.cities[0].gtfs_dir == gridville_dir / "gridville" / "gtfs"
        assert cfg.cache_dir == gridville_dir / "cache"

    def test_missing_cities_is_config_error(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("cache_dir: cache\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_malformed_yaml_is_config_error(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("cities: [unclosed\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_custom_brackets(self, tmp_path):
        write_gridville(tmp_path, seed=7)
        text = (tmp_path / "config.yaml").read_text()
        text += "demographics:\n  income_brackets: [poor, rich]\n"
        (tmp_path / "config.yaml").write_text(text)
        cfg = load_config(tmp_path / "config.yaml")
        assert cfg.schema.income == ("poor", "rich")
