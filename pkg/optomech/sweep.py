"""
Parameter sweeps over the library's observables.

A sweep is the lexicographic product of named parameter axes. Grid points are
independent evaluations, except subspace minima, which share one nested search
per (beta, epsilon) column. Work runs in parallel and lands in the table in
grid order. A failing point fills its `error` column instead of aborting.
"""

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .config import SimulationConfig
from .feasibility import PhysicalParams, requirements_report
from .fock_core import FockVector
from .interferometer import arm_overlaps, default_tau_grid
from .models import SweepTable, ValidationError
from .parallel_executor import ExecutionResult, ParallelExecutor, describe_error
from .state_prep import OPTIMAL_GAMMA_OVER_OMEGA, SubspaceMinimum, subspace_minima, success_probability_fock
from .waveforms import ExponentialDecay


logger = logging.getLogger(__name__)


class Observable(Enum):
    """Quantities a sweep can tabulate."""
    VISIBILITY_SERIES = "visibility_series"
    PROB_DENSITY = "prob_density"
    FOCK_PROB = "fock_prob"
    SUBSPACE_MIN = "subspace_min"
    FEASIBILITY = "feasibility"


FEASIBILITY_FIELDS = ["wavelength", "cavity_length", "mirror_mass", "mech_freq", "transmissivity", "quality", "temperature"]

AXES = {
    Observable.VISIBILITY_SERIES: ["beta", "big_gamma", "gamma", "tau"],
    Observable.PROB_DENSITY: ["beta", "big_gamma", "gamma", "phi", "tau"],
    Observable.FOCK_PROB: ["n", "beta", "epsilon", "gamma_over_omega"],
    Observable.SUBSPACE_MIN: ["j", "beta", "epsilon"],
    Observable.FEASIBILITY: list(FEASIBILITY_FIELDS),
}

OUTPUTS = {
    Observable.VISIBILITY_SERIES: ["p_max", "p_min", "v"],
    Observable.PROB_DENSITY: ["p"],
    Observable.FOCK_PROB: ["p", "argmax_beta"],
    Observable.SUBSPACE_MIN: ["p_min", "p_zero", "p_j", "start_index"],
    Observable.FEASIBILITY: ["beta_out", "gamma_over_omega", "strong_coupling", "resolved_sideband",
                             "linear_range", "thermal", "all_passed"],
}

INTEGER_AXES = {"n", "j"}


def parse_axis(name: str, text: str) -> List[float]:
    """
    Parse `start:stop:step` (inclusive of stop when it lands on the grid) or a
    comma-separated list.
    """
    text = text.strip()
    if not text:
        raise ValidationError(f"axis {name} is empty")
    try:
        if ":" in text:
            parts = [float(part) for part in text.split(":")]
            if len(parts) != 3:
                raise ValidationError(f"axis {name} range must be start:stop:step, got {text!r}")
            start, stop, step = parts
            if not step > 0:
                raise ValidationError(f"axis {name} step must be > 0, got {step}")
            if stop < start:
                raise ValidationError(f"axis {name} has stop < start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + k * step, 12) for k in range(count)]
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValidationError(f"invalid value in axis {name}: {e}") from e
    if not values:
        raise ValidationError(f"axis {name} is empty")
    if name in INTEGER_AXES:
        if any(value != int(value) for value in values):
            raise ValidationError(f"axis {name} must hold integers")
        return [int(value) for value in values]
    return values


def parse_grid(text: str) -> Dict[str, List[float]]:
    """`beta=0.5,1.2,2;tau=0:6.28:0.01` -> {'beta': [...], 'tau': [...]}."""
    grid = {}
    for entry in text.split(";"):
        if not entry.strip():
            continue
        if "=" not in entry:
            raise ValidationError(f"grid entry must be name=values, got {entry!r}")
        name, values = entry.split("=", 1)
        name = name.strip().replace("-", "_")
        grid[name] = parse_axis(name, values)
    return grid


@dataclass
class SweepSpec:
    """What to sweep, over which grid, and where the table goes."""
    observable: Observable
    grid: Dict[str, List[Any]] = field(default_factory=dict)
    base: SimulationConfig = field(default_factory=SimulationConfig)
    output_path: Optional[str] = None
    format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.observable, Observable):
            self.observable = Observable(self.observable)
        self.validate()

    def validate(self) -> None:
        allowed = AXES[self.observable]
        for name, values in self.grid.items():
            if name not in allowed:
                raise ValidationError(f"{self.observable.value} has no axis {name!r}; axes: {allowed}")
            if len(values) == 0:
                raise ValidationError(f"axis {name} is empty")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.format!r}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")

    @property
    def header(self) -> List[str]:
        return AXES[self.observable] + OUTPUTS[self.observable] + ["error"]

    def axis_values(self) -> List[List[Any]]:
        """Every axis of the observable, in column order; fixed axes have one value."""
        defaults = default_axes(self.observable, self.base)
        return [list(self.grid.get(name, defaults[name])) for name in AXES[self.observable]]

    def points(self) -> List[Dict[str, Any]]:
        names = AXES[self.observable]
        return [dict(zip(names, combo)) for combo in itertools.product(*self.axis_values())]

    @classmethod
    def from_config(cls, config: SimulationConfig) -> 'SweepSpec':
        return cls(
            observable=Observable(config.observable),
            grid=parse_grid(config.grid) if config.grid else default_grid(Observable(config.observable)),
            base=config,
            output_path=config.out,
            format=config.format,
            seed=config.seed,
        )


def default_axes(observable: Observable, config: SimulationConfig) -> Dict[str, List[Any]]:
    """Single-value axes taken from the configuration."""
    tau = list(default_tau_grid(config.tau_max, config.d_tau))
    values = {
        "beta": [config.beta],
        "big_gamma": [config.big_gamma],
        "gamma": [config.gamma],
        "phi": [config.phi],
        "tau": tau,
        "n": [config.n],
        "j": [config.j],
        "epsilon": [config.epsilon],
        "gamma_over_omega": [OPTIMAL_GAMMA_OVER_OMEGA],
    }
    values.update({name: [getattr(config, name)] for name in FEASIBILITY_FIELDS})
    return {name: values[name] for name in AXES[observable]}


def default_grid(observable: Observable) -> Dict[str, List[Any]]:
    """Figure-style grids for each observable."""
    if observable is Observable.VISIBILITY_SERIES:
        return {"beta": [0.5, 1.2, 2.0], "big_gamma": [0.2, 1.0, 2.0], "gamma": [1.0]}
    if observable is Observable.PROB_DENSITY:
        return {"beta": [0.5, 1.2, 2.0], "big_gamma": [2.0], "phi": [0.0, math.pi]}
    if observable is Observable.FOCK_PROB:
        return {"n": [1, 2, 5, 10], "beta": parse_axis("beta", "0.1:4:0.01"), "epsilon": [0.1]}
    if observable is Observable.SUBSPACE_MIN:
        return {"j": list(range(1, 8)), "beta": parse_axis("beta", "0.1:3:0.1"), "epsilon": [0.1]}
    return {}


def point_seed(seed: int, index: int) -> int:
    """Seed for grid point `index`, independent of the evaluation schedule."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _vacuum() -> FockVector:
    return FockVector.basis(0, 1)


def _system(config: SimulationConfig, point: Dict[str, Any]):
    overrides = {name: point[name] for name in ("beta", "big_gamma", "gamma", "phi") if name in point}
    return config.with_overrides(overrides).system_params()


def _eval_visibility(config: SimulationConfig, point: Dict[str, Any], seed: int) -> List[Any]:
    params = _system(config, point)
    overlaps = arm_overlaps(point["tau"], ExponentialDecay(params.big_gamma), params, _vacuum())
    p_max, p_min = overlaps.extrema()
    return [p_max, p_min, overlaps.visibility()]


def _eval_density(config: SimulationConfig, point: Dict[str, Any], seed: int) -> List[Any]:
    params = _system(config, point)
    overlaps = arm_overlaps(point["tau"], ExponentialDecay(params.big_gamma), params, _vacuum())
    return [overlaps.density(point["phi"])]


def _eval_fock(config: SimulationConfig, point: Dict[str, Any], seed: int) -> List[Any]:
    p = success_probability_fock(point["n"], point["beta"], point["epsilon"], point["gamma_over_omega"])
    return [p, None]


def _subspace_row(point: Dict[str, Any], minima: List[SubspaceMinimum]) -> List[Any]:
    j, beta, epsilon = point["j"], point["beta"], point["epsilon"]
    if j < 1:
        raise ValidationError("j must be >= 1")
    result = minima[j - 1]
    return [
        result.value,
        success_probability_fock(0, beta, epsilon),
        success_probability_fock(j, beta, epsilon),
        result.start_index,
    ]


def _eval_feasibility(config: SimulationConfig, point: Dict[str, Any], seed: int) -> List[Any]:
    report = requirements_report(PhysicalParams(finesse=config.finesse, **point))
    flags = [report.check(name).passed for name in ("strong_coupling", "resolved_sideband", "linear_range", "thermal")]
    return [report.beta, report.gamma_over_omega] + flags + [report.all_passed]


EVALUATORS: Dict[Observable, Callable[[SimulationConfig, Dict[str, Any], int], List[Any]]] = {
    Observable.VISIBILITY_SERIES: _eval_visibility,
    Observable.PROB_DENSITY: _eval_density,
    Observable.FOCK_PROB: _eval_fock,
    Observable.FEASIBILITY: _eval_feasibility,
}


def _fill_argmax_beta(table: SweepTable) -> None:
    """Per (n, epsilon, gamma_over_omega) curve, the beta with the largest p (first on ties)."""
    index = {name: position for position, name in enumerate(table.header)}
    best: Dict[tuple, tuple] = {}
    for row in table.rows:
        if row[index["error"]]:
            continue
        key = (row[index["n"]], row[index["epsilon"]], row[index["gamma_over_omega"]])
        p = row[index["p"]]
        if key not in best or p > best[key][0]:
            best[key] = (p, row[index["beta"]])
    for row in table.rows:
        key = (row[index["n"]], row[index["epsilon"]], row[index["gamma_over_omega"]])
        row[index["argmax_beta"]] = best[key][1] if key in best else None


class SweepExecutor:
    """Evaluates a SweepSpec over a thread pool and assembles the ordered table."""

    def __init__(self, workers: int = 1):
        self.executor = ParallelExecutor(max_workers=workers)
        self.workers = workers

    def _run_points(self, spec: SweepSpec, points: List[Dict[str, Any]]) -> List[ExecutionResult]:
        evaluate = EVALUATORS[spec.observable]
        config = spec.base
        return self.executor.map_ordered(
            lambda item: evaluate(config, item[1], point_seed(spec.seed, item[0])), list(enumerate(points))
        )

    def _run_subspace(self, spec: SweepSpec, points: List[Dict[str, Any]]) -> List[ExecutionResult]:
        """One nested search j = 1 .. max j per (beta, epsilon) column, seeded by column index."""
        columns: Dict[tuple, int] = {}
        for point in points:
            key = (point["beta"], point["epsilon"])
            columns[key] = max(columns.get(key, 1), point["j"])
        keys = list(columns)
        config = spec.base
        chains = self.executor.map_ordered(
            lambda item: subspace_minima(
                columns[item[1]], item[1][0], item[1][1], config.optimizer_config(seed=point_seed(spec.seed, item[0]))
            ),
            list(enumerate(keys)),
        )
        by_column = dict(zip(keys, chains))

        results = []
        for index, point in enumerate(points):
            chain = by_column[(point["beta"], point["epsilon"])]
            if not chain.success:
                results.append(ExecutionResult(index=index, success=False, error=chain.error, exception=chain.exception))
                continue
            try:
                results.append(ExecutionResult(index=index, value=_subspace_row(point, chain.value)))
            except Exception as e:
                results.append(ExecutionResult(index=index, success=False, error=describe_error(e), exception=e))
        return results

    def run(self, spec: SweepSpec) -> SweepTable:
        points = spec.points()
        width = len(OUTPUTS[spec.observable])
        start = time.time()
        logger.info(f"Sweep {spec.observable.value}: {len(points)} points on {self.workers} worker(s)")

        if spec.observable is Observable.SUBSPACE_MIN:
            results = self._run_subspace(spec, points)
        else:
            results = self._run_points(spec, points)

        table = SweepTable(header=spec.header)
        names = AXES[spec.observable]
        failures = 0
        for point, result in zip(points, results):
            axes = [point[name] for name in names]
            if result.success:
                table.append(axes + list(result.value) + [""])
            else:
                failures += 1
                table.append(axes + [math.nan] * width + [result.error])

        if spec.observable is Observable.FOCK_PROB:
            _fill_argmax_beta(table)
        logger.info(f"Sweep finished: {len(table)} rows, {failures} failed, {time.time() - start:.2f}s")
        return table


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepTable:
    """Evaluate every grid point of `spec`; the table is identical for any worker count."""
    return SweepExecutor(workers or spec.base.workers).run(spec)
