from __future__ import annotations

import textwrap

import pytest

from arithreg.config import DEFAULT_CONFIG, RegularityConfig, load_config
from arithreg.exceptions import ConfigNotFoundError, InvalidArgumentError
from arithreg.utils import environment_setting_name, resolve_env_reference


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("ARITHREG_TOLERANCE", "ARITHREG_THRESHOLD_GRID", "ARITHREG_SEED", "GRID_FROM_ENV"):
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)


class TestLoadConfig:
    def test_defaults(self):
        assert load_config() == DEFAULT_CONFIG

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "custom.yaml"
        path.write_text(
            textwrap.dedent(
                """
                arithreg:
                  threshold_grid: 256
                  ramp-max: 0.125
                """
            ),
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.threshold_grid == 256
        assert config.ramp_max == 0.125

    def test_default_filename_is_discovered(self, tmp_path):
        (tmp_path / "arithreg.yaml").write_text("seed: 7\n", encoding="utf-8")
        assert load_config().seed == 7

    def test_environment_beats_file(self, tmp_path, monkeypatch):
        (tmp_path / "arithreg.yaml").write_text("threshold_grid: 256\n", encoding="utf-8")
        monkeypatch.setenv("ARITHREG_THRESHOLD_GRID", "512")
        assert load_config().threshold_grid == 512

    def test_overrides_beat_environment(self, monkeypatch):
        monkeypatch.setenv("ARITHREG_SEED", "3")
        assert load_config(seed=11).seed == 11
        assert load_config(seed=None).seed == 3

    def test_dotenv_file(self, tmp_path):
        (tmp_path / ".env").write_text("ARITHREG_TOLERANCE=1e-6\n", encoding="utf-8")
        assert load_config().tolerance == 1e-6

    def test_env_reference(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRID_FROM_ENV", "64")
        (tmp_path / "arithreg.yaml").write_text("threshold_grid: env:GRID_FROM_ENV\n", encoding="utf-8")
        assert load_config().threshold_grid == 64

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigNotFoundError):
            load_config(tmp_path / "absent.yaml")

    def test_unknown_key(self, tmp_path):
        (tmp_path / "arithreg.yaml").write_text("colour: blue\n", encoding="utf-8")
        with pytest.raises(InvalidArgumentError, match="colour"):
            load_config()

    def test_bad_value(self, tmp_path):
        (tmp_path / "arithreg.yaml").write_text("threshold_grid: many\n", encoding="utf-8")
        with pytest.raises(InvalidArgumentError, match="threshold_grid"):
            load_config()


class TestRegularityConfig:
    def test_validates_ranges(self):
        with pytest.raises(InvalidArgumentError):
            RegularityConfig(ramp_min=0.5, ramp_max=0.25)
        with pytest.raises(InvalidArgumentError):
            RegularityConfig(tolerance=0)

    def test_gain_floor(self):
        assert RegularityConfig(gain_floor_divisor=16).gain_floor(0.5) == pytest.approx(0.5**4 / 16)


class TestUtils:
    def test_environment_setting_name(self):
        assert environment_setting_name("ramp-max") == "ARITHREG_RAMP_MAX"

    def test_resolve_env_reference(self, monkeypatch):
        monkeypatch.setenv("SOME_VALUE", "42")
        assert resolve_env_reference("env:SOME_VALUE") == "42"
        assert resolve_env_reference("plain") == "plain"
        assert resolve_env_reference(5) == 5
