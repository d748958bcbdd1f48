"""
Tests for parameter sweeps and the parallel execution layer.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

from optomech.config import SimulationConfig
from optomech.models import ValidationError
from optomech.parallel_executor import ParallelExecutor
from optomech.state_prep import success_probability_fock
from optomech.storage import emit
from optomech.sweep import Observable, SweepSpec, parse_axis, parse_grid, point_seed, run_sweep


def test_parallel_executor_keeps_order_and_captures_errors():
    def invert(value):
        return 1.0 / value

    for workers in (1, 3):
        results = ParallelExecutor(max_workers=workers).map_ordered(invert, [1.0, 0.0, 4.0])
        assert [result.index for result in results] == [0, 1, 2]
        assert results[0].value == 1.0
        assert not results[1].success
        assert results[1].error.startswith("ZeroDivisionError")
        assert results[2].value == 0.25

    with pytest.raises(ValueError):
        ParallelExecutor(max_workers=0)


def test_parse_axis():
    assert parse_axis("beta", "0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_axis("beta", "0.1:0.35:0.1") == [0.1, 0.2, 0.3]
    assert parse_axis("beta", "0.5, 1.2,2") == [0.5, 1.2, 2.0]
    assert parse_axis("n", "1,2,5") == [1, 2, 5]
    for bad in ("", "1:0:0.1", "0:1:0", "0:1", "a,b"):
        with pytest.raises(ValidationError):
            parse_axis("beta", bad)
    with pytest.raises(ValidationError):
        parse_axis("n", "1.5")


def test_parse_grid():
    grid = parse_grid("beta=0.5,1; big-gamma=0.2:0.4:0.2")
    assert grid == {"beta": [0.5, 1.0], "big_gamma": [0.2, 0.4]}
    with pytest.raises(ValidationError):
        parse_grid("beta")


def test_spec_validation():
    with pytest.raises(ValidationError):
        SweepSpec(observable=Observable.FOCK_PROB, grid={"tau": [1.0]})
    with pytest.raises(ValidationError):
        SweepSpec(observable="fock_prob", format="xml")
    spec = SweepSpec(observable="subspace_min", grid={"j": [1, 2]})
    assert spec.header == ["j", "beta", "epsilon", "p_min", "p_zero", "p_j", "start_index", "error"]
    assert len(spec.points()) == 2


def test_point_seed_is_deterministic():
    assert point_seed(5, 3) == point_seed(5, 3)
    assert point_seed(5, 3) != point_seed(5, 4)


def test_fock_probability_sweep():
    spec = SweepSpec(observable=Observable.FOCK_PROB, grid={"n": [1], "beta": [0.5, 1.0, 1.5], "epsilon": [0.1]})
    table = run_sweep(spec)
    assert table.column("beta") == [0.5, 1.0, 1.5]
    assert table.column("p")[1] == pytest.approx(success_probability_fock(1, 1.0, 0.1))
    assert table.column("argmax_beta") == [1.0, 1.0, 1.0]
    assert table.column("error") == ["", "", ""]


def test_failed_point_fills_error_column():
    spec = SweepSpec(observable=Observable.FOCK_PROB, grid={"n": [0], "beta": [1e-7, 1.0]})
    table = run_sweep(spec)
    first, second = table.records()
    assert math.isnan(first["p"])
    assert first["error"].startswith("DegenerateTargetError")
    assert second["error"] == ""
    assert second["argmax_beta"] == 1.0


def test_sweep_is_independent_of_workers():
    base = SimulationConfig(tau_max=0.5, d_tau=0.25)
    spec = SweepSpec(observable=Observable.VISIBILITY_SERIES, grid={"beta": [0.5, 1.0]}, base=base)
    serial = run_sweep(spec, workers=1)
    threaded = run_sweep(spec, workers=4)
    assert len(serial) == 6
    assert serial.rows == threaded.rows
    assert serial.column("tau")[:3] == [0.0, 0.25, 0.5]


def test_probability_density_sweep():
    base = SimulationConfig(tau_max=0.5, d_tau=0.5)
    spec = SweepSpec(observable=Observable.PROB_DENSITY, grid={"beta": [1.0], "phi": [0.0, math.pi]}, base=base)
    table = run_sweep(spec)
    assert len(table) == 4
    assert all(value >= 0.0 for value in table.column("p"))


def test_subspace_sweep_is_seeded():
    base = SimulationConfig(starts=2, max_evaluations=300)
    spec = SweepSpec(observable=Observable.SUBSPACE_MIN, grid={"j": [1], "beta": [1.5]}, base=base, seed=9)
    first = run_sweep(spec)
    second = run_sweep(spec)
    assert first.rows == second.rows
    record = first.records()[0]
    assert record["p_min"] <= min(record["p_zero"], record["p_j"]) * (1.0 + 1e-12)


def test_feasibility_sweep():
    spec = SweepSpec(observable=Observable.FEASIBILITY, grid={"temperature": [1e-3, 1.0]})
    table = run_sweep(spec)
    assert table.column("thermal") == [True, False]
    assert table.column("beta_out")[0] == pytest.approx(2.58114, rel=1e-3)


def test_spec_from_config_uses_default_grid():
    spec = SweepSpec.from_config(SimulationConfig(observable="fock_prob"))
    assert spec.axis_values()[0] == [1, 2, 5, 10]
    assert len(spec.axis_values()[1]) == 391


def test_subspace_sweep_rows_are_nested_per_column():
    base = SimulationConfig(starts=2, max_evaluations=300)
    spec = SweepSpec(observable=Observable.SUBSPACE_MIN, grid={"j": [1, 2, 3], "beta": [1.0, 2.5]}, base=base, seed=4)
    table = run_sweep(spec, workers=2)
    assert table.column("error") == [""] * 6
    for beta in (1.0, 2.5):
        values = [record["p_min"] for record in table.records() if record["beta"] == beta]
        assert values[0] >= values[1] >= values[2]


def test_subspace_sweep_reports_bad_level():
    base = SimulationConfig(starts=2, max_evaluations=300)
    spec = SweepSpec(observable=Observable.SUBSPACE_MIN, grid={"j": [0, 1], "beta": [1.5]}, base=base)
    first, second = run_sweep(spec).records()
    assert first["error"].startswith("ValidationError")
    assert second["error"] == ""


def test_emitted_sweep_is_byte_identical_across_workers(tmp_path):
    base = SimulationConfig(tau_max=0.5, d_tau=0.25, starts=2, max_evaluations=300)
    specs = [
        SweepSpec(observable=Observable.VISIBILITY_SERIES, grid={"beta": [0.5, 1.0]}, base=base, seed=2),
        SweepSpec(observable=Observable.SUBSPACE_MIN, grid={"j": [1, 2], "beta": [1.0, 2.0]}, base=base, seed=2),
    ]
    for number, spec in enumerate(specs):
        contents = []
        for workers in (1, 4, 16):
            path = tmp_path / f"sweep_{number}_{workers}.csv"
            emit(run_sweep(spec, workers=workers), "csv", str(path))
            contents.append(path.read_bytes())
        assert contents[0] == contents[1] == contents[2]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
