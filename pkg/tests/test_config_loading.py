"""Tests for reading study configurations and locating their errors."""

import json

import pytest

from errors import ConfigError
from utils.config_loading import format_config_error, locate_line, parse_config, read_config


def line_of(text, needle, occurrence=0):
    return [number for number, line in enumerate(text.splitlines(), start=1) if needle in line][occurrence]


class TestParseConfig:

    def test_valid_config(self, config_dict):
        config = parse_config(json.dumps(config_dict(sweep={"parameter": "zeta", "grid": {"values": [1.0]}})))
        assert len(config.laminate.layers) == 2
        assert config.sweep.parameter == "zeta"
        assert config.compare is None

    def test_syntax_error_carries_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config('{\n  "laminate": \n}')
        assert info.value.line == 3
        assert info.value.message.startswith("invalid JSON")

    def test_missing_field_located(self):
        with pytest.raises(ConfigError) as info:
            parse_config('{"laminate": {"epsilon": 1.0}}')
        assert info.value.loc == ("laminate", "layers")

    def test_unknown_key_located(self, config_dict):
        with pytest.raises(ConfigError) as info:
            parse_config(json.dumps(config_dict(bogus=1)))
        assert info.value.loc == ("bogus",)

    def test_further_errors_are_counted(self):
        with pytest.raises(ConfigError, match=r"\(and 1 more\)"):
            parse_config('{"laminate": {"layers": []}, "bogus": 1}')

    def test_validator_prefix_stripped(self, config_dict):
        with pytest.raises(ConfigError) as info:
            parse_config(json.dumps(config_dict(sweep={"parameter": "zeta", "grid": {"values": [-1.0]}})))
        assert info.value.message == "sweep grid values must be strictly positive and finite"


class TestReadConfig:

    def test_returns_text(self, config_dict, write_config):
        path = write_config(config_dict())
        config, text = read_config(path)
        assert text == path.read_text(encoding="utf-8")
        assert config.laminate.epsilon == 1.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config") as info:
            read_config(tmp_path / "absent.json")
        assert info.value.line == 0


class TestLocateLine:

    def test_second_layer_phase(self, config_dict):
        text = json.dumps(config_dict(), indent=2)
        assert locate_line(text, ("laminate", "layers", 1, "phase")) == line_of(text, '"phase"', 1)
        assert locate_line(text, ("laminate", "layers", 0, "fraction")) == line_of(text, '"fraction"', 0)

    def test_unknown_key_stays_at_the_last_match(self, config_dict):
        text = json.dumps(config_dict(), indent=2)
        assert locate_line(text, ("laminate", "nothing")) == line_of(text, '"laminate"')
        assert locate_line(text, ("sweep",)) == 1


class TestFormatConfigError:

    def test_with_location_and_text(self, config_dict):
        text = json.dumps(config_dict(), indent=2)
        error = ConfigError("K must be positive, got -1.0", loc=("laminate", "layers", 1, "phase"))
        line = line_of(text, '"phase"', 1)
        rendered = format_config_error(error, text, "study.json")
        assert rendered == f"study.json:{line}: laminate.layers.1.phase: K must be positive, got -1.0"

    def test_known_line_wins(self):
        assert format_config_error(ConfigError("invalid JSON: boom", line=4), "{}", "a.json") == "a.json:4: invalid JSON: boom"

    def test_without_text(self):
        assert format_config_error(ConfigError("bad", loc=("sweep",))) == "<config>:0: sweep: bad"
