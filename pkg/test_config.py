"""
Tests for simulation configuration.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

from optomech.config import SimulationConfig
from optomech.models import TruncationMode, ValidationError


def test_defaults():
    config = SimulationConfig()
    assert config.gamma == 1.0
    assert config.epsilon == 0.1
    assert config.truncation_policy().mode is TruncationMode.ADAPTIVE
    params = config.system_params()
    assert params.beta == 1.0
    assert params.quad.base_step == 0.02


def test_system_params_clamps_step_for_wide_cavity():
    params = SimulationConfig(gamma=4.0).system_params()
    assert params.quad.base_step == pytest.approx(1.0 / 4.0 / 50.0)


def test_fixed_truncation():
    config = SimulationConfig(n_trunc=40)
    policy = config.truncation_policy()
    assert policy.mode is TruncationMode.FIXED
    assert policy.dim == 40


def test_from_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# interferometer run\n"
        "beta=2.5\n"
        "big-gamma=0.2\n"
        "n_trunc=60\n"
        "workers=4\n"
        "format=json\n"
        "finesse=none\n"
    )
    config = SimulationConfig.from_file(str(path))
    assert config.beta == 2.5
    assert config.big_gamma == 0.2
    assert config.n_trunc == 60
    assert config.workers == 4
    assert config.format == "json"
    assert config.finesse is None


def test_from_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("beta=1\ncolour=blue\n")
    with pytest.raises(ValidationError) as excinfo:
        SimulationConfig.from_file(str(path))
    assert "colour" in str(excinfo.value)


def test_from_file_rejects_bad_values(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("n_trunc=many\n")
    with pytest.raises(ValidationError):
        SimulationConfig.from_file(str(path))


def test_missing_file():
    with pytest.raises(ValidationError):
        SimulationConfig.from_file("/nonexistent/run.conf")


def test_overrides_and_validation():
    config = SimulationConfig().with_overrides({"beta": 0.5, "seed": 3, "unknown": 1})
    assert config.beta == 0.5
    assert config.seed == 3
    assert config.optimizer_config().seed == 3
    assert config.optimizer_config(seed=11).seed == 11
    with pytest.raises(ValidationError):
        SimulationConfig(format="xml")
    with pytest.raises(ValidationError):
        SimulationConfig(log_level="LOUD")


def test_physical_params():
    params = SimulationConfig(temperature=0.5).physical_params()
    assert params.temperature == 0.5
    assert params.wavelength == 1064e-9


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
