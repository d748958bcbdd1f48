"""
Configuration for the optomechanics simulator.

Defaults follow the figure settings (gamma = omega_m = 1, epsilon = 0.1).
A flat `key=value` config file with `#` comments can override them, and
command-line flags override the file.
"""

import math
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values

from .feasibility import PhysicalParams
from .models import (
    OptimizerConfig,
    QuadratureConfig,
    SystemParams,
    TruncationPolicy,
    ValidationError,
)


@dataclass
class SimulationConfig:
    """Settings shared by the CLI subcommands and sweeps."""

    # System (dimensionless, omega_m = 1)
    beta: float = 1.0
    gamma: float = 1.0
    big_gamma: float = 1.0
    phi: float = 0.0

    # State preparation
    epsilon: float = 0.1
    n: int = 1
    j: int = 1
    coeffs: str = ""  # comma-separated complex literals, e.g. "1,1j" or "0.6,0.8"

    # Truncation; n_trunc=None selects the adaptive policy
    n_trunc: Optional[int] = None
    tail_mass: float = 1e-12
    max_dim: int = 512

    # Time grid and quadrature
    tau_max: float = 4.0 * math.pi
    d_tau: float = math.pi / 200.0
    base_step: float = 0.02
    refine_factor: int = 8
    tolerance: float = 1e-9

    # Optimizer and parallelism
    seed: int = 20240101
    starts: int = 32
    max_evaluations: int = 2000
    workers: int = 1

    # Output
    out: Optional[str] = None
    format: str = "csv"
    log_level: str = "INFO"

    # Laboratory parameters (SI, mech_freq in rad/s); finesse=None means 2 pi / transmissivity
    wavelength: float = 1064e-9
    cavity_length: float = 1e-2
    mirror_mass: float = 1e-12
    mech_freq: float = 2.0 * math.pi * 1e3
    transmissivity: float = 1e-7
    quality: float = 1e6
    temperature: float = 1e-3
    finesse: Optional[float] = None

    # Sweeps
    observable: str = "visibility_series"
    grid: str = ""

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.format!r}")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValidationError(f"unknown log level {self.log_level!r}")

    def truncation_policy(self) -> TruncationPolicy:
        if self.n_trunc is not None:
            return TruncationPolicy.fixed(self.n_trunc)
        return TruncationPolicy.adaptive(self.tail_mass, self.max_dim)

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig(base_step=self.base_step, refine_factor=self.refine_factor,
                                tolerance=self.tolerance)

    def system_params(self) -> SystemParams:
        quad = self.quadrature_config()
        limit = min(1.0 / self.gamma, 1.0) / 50.0 if self.gamma > 0 else quad.base_step
        if quad.base_step > limit:
            quad = QuadratureConfig(base_step=limit, refine_factor=quad.refine_factor,
                                    tolerance=quad.tolerance)
        return SystemParams(beta=self.beta, gamma=self.gamma, big_gamma=self.big_gamma, phi=self.phi,
                            policy=self.truncation_policy(), quad=quad)

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(
            wavelength=self.wavelength, cavity_length=self.cavity_length, mirror_mass=self.mirror_mass,
            mech_freq=self.mech_freq, transmissivity=self.transmissivity, quality=self.quality,
            temperature=self.temperature, finesse=self.finesse,
        )

    def optimizer_config(self, seed: Optional[int] = None) -> OptimizerConfig:
        return OptimizerConfig(n_starts=self.starts, seed=self.seed if seed is None else seed,
                               max_evaluations=self.max_evaluations, workers=self.workers)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SimulationConfig':
        """Create config from dictionary; unknown keys are ignored, strings are coerced."""
        values = {}
        for item in fields(cls):
            if item.name in data:
                values[item.name] = _coerce(item.name, data[item.name], item.default)
        return cls(**values)

    @classmethod
    def from_file(cls, path: str) -> 'SimulationConfig':
        """Load a flat key=value file; keys are long flag names (dashes or underscores)."""
        if not os.path.exists(path):
            raise ValidationError(f"config file not found: {path}")
        raw = dotenv_values(path)
        data = {key.strip().lstrip("-").replace("-", "_"): value for key, value in raw.items()}
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown keys in {path}: {', '.join(unknown)}")
        return cls.from_dict(data)

    def with_overrides(self, overrides: Mapping[str, Any]) -> 'SimulationConfig':
        merged = self.to_dict()
        merged.update({key: value for key, value in overrides.items() if key in merged})
        return SimulationConfig.from_dict(merged)


OPTIONAL_FIELDS = {"n_trunc": int, "out": str, "finesse": float}


def _coerce(name: str, value: Any, default: Any) -> Any:
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if name in OPTIONAL_FIELDS:
            if text == "" or text.lower() == "none":
                return None
            return OPTIONAL_FIELDS[name](text)
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ValidationError(f"invalid value for {name}: {value!r}")
    return text
