# -*- coding: utf-8 -*-

import pytest

import schwarzflow.config as config
import schwarzflow.constants as constants
import schwarzflow.exceptions as exceptions

SAMPLE = """
# a small flow
epsilon = 1e-3      # amplitude
grid_n = 128
background = g0
epsilons = 1e-3, 1e-4
"""


def test_parse_types_and_comments():
    values = config.parse(SAMPLE)
    assert values == {"epsilon": 1e-3, "grid_n": 128, "background": "g0",
                      "epsilons": [1e-3, 1e-4]}
    assert isinstance(values["grid_n"], int)


def test_parse_reports_line_numbers():
    with pytest.raises(exceptions.ConfigError) as info:
        config.parse("epsilon = 1e-3\ngrid_n = many\n", source="run.cfg")
    assert str(info.value).startswith("run.cfg:2:")


@pytest.mark.parametrize("text", [
    "nonsense\n",
    "colour = red\n",
    "background = flat\n",
    "epsilons = \n",
    "samples = 2.5\n",
])
def test_parse_rejects(text):
    with pytest.raises(exceptions.ConfigError):
        config.parse(text)


def test_load_defaults():
    assert config.load() == constants.DEFAULTS
    assert config.load() is not constants.DEFAULTS


def test_load_file_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SAMPLE)
    values = config.load(str(path), {"epsilon": 5e-4, "workers": None})
    assert values["epsilon"] == 5e-4
    assert values["workers"] == constants.DEFAULTS["workers"]
    assert values["grid_n"] == 128
    assert values["t_common"] == constants.DEFAULTS["t_common"]


def test_load_rejects_missing_file(tmp_path):
    with pytest.raises(exceptions.ConfigError):
        config.load(str(tmp_path / "absent.cfg"))


def test_load_rejects_unknown_override():
    with pytest.raises(exceptions.ConfigError):
        config.load(overrides={"colour": "red"})


def test_default_amplitudes():
    values = config.load()
    assert values["epsilon"] == 1e-3
    assert values["epsilons"] == [0.0625, 0.03125, 0.015625, 0.0078125,
                                  0.00390625]
