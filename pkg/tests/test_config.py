"""
配置管理测试
"""

import json
import math

import pytest
import toml
import yaml

from qgindex.core import DEFAULT_CONFIG, ApplicationConfiguration, ConfigurationManager


class TestDefaults:
    def test_default_values(self):
        assert DEFAULT_CONFIG.heat_trace.t_ref == 0.02
        assert DEFAULT_CONFIG.spectrum.bisection_tolerance == 1e-10
        assert DEFAULT_CONFIG.output.significant_digits == 17
        assert DEFAULT_CONFIG.logging.level == "WARNING"
        assert not DEFAULT_CONFIG.logging.file_enabled

    def test_spectral_k_max(self):
        k_max = DEFAULT_CONFIG.heat_trace.spectral_k_max(0.01)
        assert k_max ** 2 * 0.01 == pytest.approx(-math.log(1e-14))

    def test_missing_file_uses_defaults(self, tmp_path):
        manager = ConfigurationManager(tmp_path / "absent.yaml")
        assert manager.get_config() == DEFAULT_CONFIG
        assert not (tmp_path / "absent.yaml").exists()

    @pytest.mark.parametrize("data", [
        {"tolerances": {"unitarity": 0.0}},
        {"heat_trace": {"t_ref": -1.0}},
        {"spectrum": {"grid_oversample": 0}},
        {"logging": {"level": "LOUD"}},
    ])
    def test_invalid_values_rejected(self, data):
        with pytest.raises(ValueError):
            ApplicationConfiguration(**data)


class TestFiles:
    @pytest.mark.parametrize("suffix,dump", [
        (".yaml", yaml.safe_dump),
        (".json", json.dumps),
        (".toml", toml.dumps),
    ])
    def test_load_formats(self, tmp_path, suffix, dump):
        path = tmp_path / f"config{suffix}"
        path.write_text(dump({"heat_trace": {"t_ref": 0.05}, "logging": {"level": "debug"}}), encoding="utf-8")
        manager = ConfigurationManager(path)
        assert manager.get_value("heat_trace.t_ref") == 0.05
        assert manager.get_value("logging.level") == "DEBUG"
        assert manager.get_value("spectrum.root_tolerance") == 1e-6

    def test_broken_file_falls_back(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json", encoding="utf-8")
        manager = ConfigurationManager(path)
        assert not manager.load_config()
        assert manager.get_config() == DEFAULT_CONFIG

    @pytest.mark.parametrize("format", ["yaml", "json", "toml"])
    def test_export_and_reload(self, tmp_path, format):
        manager = ConfigurationManager(tmp_path / "absent.yaml")
        manager.set_value("output.significant_digits", 9)
        path = tmp_path / f"exported.{format}"
        assert manager.export_config(path, format)
        reloaded = ConfigurationManager(path)
        assert reloaded.get_value("output.significant_digits") == 9
        assert reloaded.get_config().heat_trace == DEFAULT_CONFIG.heat_trace

    def test_save_creates_directory(self, tmp_path):
        path = tmp_path / "nested" / "config.yaml"
        manager = ConfigurationManager(path)
        manager.set_value("heat_trace.t_ref", 0.03)
        assert manager.save_config()
        assert ConfigurationManager(path).get_value("heat_trace.t_ref") == 0.03

    def test_unsupported_export_format(self, tmp_path):
        manager = ConfigurationManager(tmp_path / "absent.yaml")
        assert not manager.export_config(tmp_path / "config.ini", "ini")


class TestUpdates:
    @pytest.fixture
    def manager(self, tmp_path):
        return ConfigurationManager(tmp_path / "absent.yaml")

    def test_set_value_validates(self, manager):
        assert manager.set_value("heat_trace.t_ref", 0.1)
        assert not manager.set_value("heat_trace.t_ref", -0.1)
        assert manager.get_value("heat_trace.t_ref") == 0.1
        assert not manager.set_value("t_ref", 0.1)
        assert not manager.set_value("heat_trace.unknown", 1)

    def test_get_value_default(self, manager):
        assert manager.get_value("spectrum.missing", "fallback") == "fallback"
        assert manager.get_section("nothing") is None

    def test_update_section_and_reset(self, manager):
        assert manager.update_section("spectrum", {"grid_oversample": 8, "bogus": 1})
        assert manager.get_value("spectrum.grid_oversample") == 8
        assert manager.reset_to_default("spectrum")
        assert manager.get_value("spectrum.grid_oversample") == DEFAULT_CONFIG.spectrum.grid_oversample

    def test_validate_cross_field(self, manager):
        assert manager.validate_config() == (True, [])
        manager.update_section("spectrum", {"bisection_tolerance": 1e-3})
        valid, errors = manager.validate_config()
        assert not valid
        assert len(errors) == 1

    def test_watchers(self, manager):
        events = []
        manager.add_watcher("config_changed", events.append)
        manager.set_value("output.significant_digits", 12)
        assert events == [{"key": "output.significant_digits", "old_value": 17, "new_value": 12}]
        manager.remove_watcher("config_changed", events.append)
        manager.set_value("output.significant_digits", 10)
        assert len(events) == 1
