"""
Tests for the command-line front end.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

from optomech.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, main, parse_coeffs
from optomech.models import ValidationError
from optomech.state_prep import success_probability_fock
from optomech.storage import load_table


def test_prep_fock(tmp_path):
    out = str(tmp_path / "fock.csv")
    assert main(["prep-fock", "--n", "1", "--beta", "1", "--epsilon", "0.1", "--out", out]) == EXIT_OK
    record = load_table(out).records()[0]
    assert record["n"] == 1
    assert record["success_probability"] == pytest.approx(success_probability_fock(1, 1.0, 0.1))
    assert record["approximation_valid"] is True


def test_prep_state_json(tmp_path):
    out = str(tmp_path / "state.json")
    code = main(["prep-state", "--coeffs", "1,0.5j", "--beta", "1.5", "--format", "json", "--out", out])
    assert code == EXIT_OK
    record = load_table(out).records()[0]
    assert record["levels"] == 2
    assert record["window_delta_tau"] > 0


def test_feasibility_to_stdout(capsys):
    assert main(["feasibility", "--temperature", "1.0"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 2
    header = lines[0].split(",")
    assert header[0] == "beta"
    assert "thermal_passed" in header
    assert lines[1].endswith("false")


def test_visibility_small_grid(tmp_path):
    out = str(tmp_path / "vis.csv")
    code = main(["visibility", "--beta", "0.5", "--tau-max", "0.5", "--d-tau", "0.25", "--out", out])
    assert code == EXIT_OK
    table = load_table(out)
    assert table.header == ["tau", "p_max", "p_min", "v"]
    assert len(table) == 3


def test_probdensity_small_grid(tmp_path):
    out = str(tmp_path / "p.csv")
    code = main(["probdensity", "--phi", "3.14159", "--tau-max", "0.4", "--d-tau", "0.2", "--out", out])
    assert code == EXIT_OK
    assert load_table(out).column("phi") == [3.14159] * 3


def test_sweep_command(tmp_path):
    out = str(tmp_path / "sweep.csv")
    code = main(["sweep", "--observable", "fock_prob", "--grid", "n=1,2;beta=0.5,1", "--out", out])
    assert code == EXIT_OK
    assert len(load_table(out)) == 4


def test_config_file_and_flag_precedence(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("beta=2.0\nn=2\n")
    out = str(tmp_path / "fock.csv")
    assert main(["prep-fock", "--config", str(config), "--beta", "1.5", "--out", out]) == EXIT_OK
    record = load_table(out).records()[0]
    assert record["beta"] == 1.5
    assert record["n"] == 2


def test_invalid_input_exit_code(tmp_path):
    assert main(["prep-fock", "--epsilon", "0.7"]) == EXIT_INVALID
    assert main(["prep-state", "--coeffs", "1,abc"]) == EXIT_INVALID
    assert main(["prep-fock", "--config", str(tmp_path / "absent.conf")]) == EXIT_INVALID
    assert main(["sweep", "--observable", "fock_prob", "--grid", "tau=1"]) == EXIT_INVALID


def test_io_exit_code(tmp_path):
    out = str(tmp_path / "missing" / "fock.csv")
    assert main(["prep-fock", "--out", out]) == EXIT_IO


def test_parse_coeffs():
    assert list(parse_coeffs("1, 2j,0.5-0.5j")) == [1, 2j, 0.5 - 0.5j]
    with pytest.raises(ValidationError):
        parse_coeffs("")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
