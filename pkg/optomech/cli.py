"""
Command-line front end.

Every subcommand prints (or writes with --out) one table. Settings come from
the built-in defaults, then an optional --config file, then the flags.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
"""

import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .config import SimulationConfig
from .feasibility import requirements_report
from .fock_core import FockVector
from .interferometer import arm_overlaps, default_tau_grid, visibility_series
from .models import NumericalError, PrepReport, SweepTable, TargetState, ValidationError
from .parallel_executor import ParallelExecutor
from .state_prep import OPTIMAL_GAMMA_OVER_OMEGA, min_success_over_subspace, success_probability_state
from .storage import StorageError, emit
from .sweep import Observable, SweepSpec, run_sweep
from .waveforms import ExponentialDecay


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

PREP_COLUMNS = ["window_delta_tau", "success_probability", "achieved_overlap", "normalization_z",
                "approximation_valid"]


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    group = common.add_argument_group("system")
    group.add_argument("--beta", type=float, help="dimensionless coupling")
    group.add_argument("--gamma", type=float, help="cavity bandwidth in units of omega_m")
    group.add_argument("--big-gamma", type=float, help="photon envelope width in units of omega_m")
    group.add_argument("--phi", type=float, help="interferometer detuning phase (rad)")
    group = common.add_argument_group("state preparation")
    group.add_argument("--epsilon", type=float, help="allowed infidelity, in (0, 0.5)")
    group.add_argument("--n", type=int, help="displaced Fock target level")
    group.add_argument("--j", type=int, help="subspace dimension minus one")
    group.add_argument("--coeffs", type=str, help="target coefficients, comma-separated complex literals")
    group.add_argument("--starts", type=int, help="random optimizer starts")
    group = common.add_argument_group("numerics")
    group.add_argument("--n-trunc", type=int, help="fixed Fock truncation (adaptive when omitted)")
    group.add_argument("--tau-max", type=float, help="largest detection time")
    group.add_argument("--d-tau", type=float, help="detection time step")
    group.add_argument("--seed", type=int, help="random seed")
    group.add_argument("--workers", type=int, help="parallel workers")
    group = common.add_argument_group("laboratory")
    for name in ("wavelength", "cavity-length", "mirror-mass", "mech-freq", "transmissivity",
                 "quality", "temperature", "finesse"):
        group.add_argument(f"--{name}", type=float)
    group = common.add_argument_group("output")
    group.add_argument("--out", type=str, help="output file (stdout when omitted)")
    group.add_argument("--format", choices=["csv", "json"])
    group.add_argument("--config", type=str, help="key=value settings file")
    group.add_argument("--log-level", type=str)
    group.add_argument("--observable", choices=[item.value for item in Observable])
    group.add_argument("--grid", type=str, help="sweep axes, e.g. 'beta=0.5,1.2,2;big_gamma=0.2:2:0.9'")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomech",
        description="Single-photon optomechanical interferometer simulator",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name, help_text in (
        ("visibility", "p_max, p_min and visibility over the detection-time grid"),
        ("probdensity", "detection probability density at --phi over the detection-time grid"),
        ("prep-fock", "window and success probability for the displaced Fock target --n"),
        ("prep-state", "window and success probability for the target --coeffs"),
        ("subspace-min", "worst-case success probability over span{|0~>..|j~>}"),
        ("feasibility", "dimensionless parameters and experimental requirements"),
        ("sweep", "tabulate --observable over --grid"),
    ):
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def resolve_config(args: argparse.Namespace) -> SimulationConfig:
    """Defaults < --config file < flags."""
    values: Dict[str, Any] = vars(args).copy()
    values.pop("command", None)
    config_path = values.pop("config", None)
    config = SimulationConfig.from_file(config_path) if config_path else SimulationConfig()
    return config.with_overrides(values)


def parse_coeffs(text: str) -> np.ndarray:
    if not text.strip():
        raise ValidationError("--coeffs is required for prep-state")
    try:
        return np.array([complex(item.strip().replace(" ", "")) for item in text.split(",")])
    except ValueError as e:
        raise ValidationError(f"invalid --coeffs {text!r}: {e}") from e


def _prep_table(prefix: Dict[str, Any], report: PrepReport) -> SweepTable:
    values = report.to_dict()
    return SweepTable(header=list(prefix) + PREP_COLUMNS,
                      rows=[list(prefix.values()) + [values[name] for name in PREP_COLUMNS]])


def _vacuum() -> FockVector:
    return FockVector.basis(0, 1)


def cmd_visibility(config: SimulationConfig) -> SweepTable:
    params = config.system_params()
    taus = default_tau_grid(config.tau_max, config.d_tau)
    return visibility_series(ExponentialDecay(params.big_gamma), params, _vacuum(), taus, workers=config.workers)


def cmd_probdensity(config: SimulationConfig) -> SweepTable:
    params = config.system_params()
    waveform = ExponentialDecay(params.big_gamma)
    taus = list(default_tau_grid(config.tau_max, config.d_tau))
    results = ParallelExecutor(config.workers).map_ordered(
        lambda tau: arm_overlaps(tau, waveform, params, _vacuum()), taus
    )
    table = SweepTable(header=["tau", "phi", "p"])
    for tau, result in zip(taus, results):
        if not result.success:
            raise result.exception
        table.append([tau, params.phi, result.value.density(params.phi)])
    return table


def cmd_prep_fock(config: SimulationConfig) -> SweepTable:
    report = success_probability_state(TargetState.fock(config.n, config.beta), config.epsilon)
    prefix = {"n": config.n, "beta": config.beta, "epsilon": config.epsilon,
              "gamma_over_omega": OPTIMAL_GAMMA_OVER_OMEGA}
    return _prep_table(prefix, report)


def cmd_prep_state(config: SimulationConfig) -> SweepTable:
    target = TargetState.from_unnormalized(parse_coeffs(config.coeffs), config.beta)
    report = success_probability_state(target, config.epsilon)
    prefix = {"levels": target.coeffs.size, "beta": config.beta, "epsilon": config.epsilon,
              "gamma_over_omega": OPTIMAL_GAMMA_OVER_OMEGA}
    return _prep_table(prefix, report)


def cmd_subspace_min(config: SimulationConfig) -> SweepTable:
    result = min_success_over_subspace(config.j, config.beta, config.epsilon, config.optimizer_config())
    coefficients = ";".join(f"{c.real:.17g}{c.imag:+.17g}j" for c in result.coefficients)
    return SweepTable(
        header=["j", "beta", "epsilon", "p_min", "start_index", "evaluations", "converged_starts", "coefficients"],
        rows=[[config.j, config.beta, config.epsilon, result.value, result.start_index,
               result.evaluations, result.converged_starts, coefficients]],
    )


def cmd_feasibility(config: SimulationConfig) -> SweepTable:
    report = requirements_report(config.physical_params())
    header = ["beta", "beta_momentum_kick", "beta_ratio", "gamma_over_omega", "zero_point_length", "finesse"]
    row = [report.beta, report.beta_momentum_kick, report.beta_ratio, report.gamma_over_omega,
           report.zero_point_length, report.finesse]
    for check in report.checks:
        header += [f"{check.name}_lhs", f"{check.name}_rhs", f"{check.name}_passed"]
        row += [check.lhs, check.rhs, check.passed]
    header.append("all_passed")
    row.append(report.all_passed)
    return SweepTable(header=header, rows=[row])


def cmd_sweep(config: SimulationConfig) -> SweepTable:
    return run_sweep(SweepSpec.from_config(config))


COMMANDS = {
    "visibility": cmd_visibility,
    "probdensity": cmd_probdensity,
    "prep-fock": cmd_prep_fock,
    "prep-state": cmd_prep_state,
    "subspace-min": cmd_subspace_min,
    "feasibility": cmd_feasibility,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = resolve_config(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(level=getattr(logging, config.log_level.upper()), format=LOG_FORMAT, stream=sys.stderr)

    try:
        table = COMMANDS[args.command](config)
        emit(table, config.format, config.out)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID
    except NumericalError as e:
        logger.error(f"Numerical failure: {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except (StorageError, OSError) as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO
    return EXIT_OK
