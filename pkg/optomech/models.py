"""
Data models for the optomechanics simulator.

This module defines the parameter objects and report types shared across the
package, together with the validation helpers that keep them consistent.
Times are in units of 1/omega_m and rates in units of omega_m throughout.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np


class ValidationError(Exception):
    """Raised when input validation fails."""
    pass


class DomainError(ValidationError):
    """Raised when an evaluation point lies outside the region a formula covers."""
    pass


class NumericalError(Exception):
    """Base class for numerical failures (truncation, quadrature, optimizer)."""
    pass


NORMALIZATION_TOLERANCE = 1e-10


def validate_finite(value: float, field_name: str) -> float:
    """Validate that a value is a finite real number."""
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise ValidationError(f"{field_name} must be a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise ValidationError(f"{field_name} must be finite, got {value}")
    return float(value)


def validate_positive_number(value: float, field_name: str, allow_zero: bool = True) -> float:
    """Validate that a number is positive (or non-negative if allow_zero)."""
    value = validate_finite(value, field_name)
    if allow_zero and value < 0:
        raise ValidationError(f"{field_name} must be non-negative, got {value}")
    if not allow_zero and value <= 0:
        raise ValidationError(f"{field_name} must be positive, got {value}")
    return value


def validate_non_negative_integer(value: int, field_name: str) -> int:
    """Validate that a value is an integer >= 0."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{field_name} must be an integer, got {type(value).__name__}")
    if value < 0:
        raise ValidationError(f"{field_name} must be non-negative, got {value}")
    return int(value)


def validate_probability(value: float, field_name: str, low: float = 0.0, high: float = 1.0) -> float:
    """Validate that a value lies in the open interval (low, high)."""
    value = validate_finite(value, field_name)
    if not low < value < high:
        raise ValidationError(f"{field_name} must lie in ({low}, {high}), got {value}")
    return value


class TruncationMode(Enum):
    """How the Fock-space dimension is chosen."""
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of the oscillator's number basis."""
    mode: TruncationMode = TruncationMode.ADAPTIVE
    dim: Optional[int] = None
    target_tail_mass: float = 1e-12
    max_dim: int = 512

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.mode, TruncationMode):
            raise ValidationError(f"mode must be a TruncationMode, got {self.mode!r}")
        validate_non_negative_integer(self.max_dim, "max_dim")
        if self.mode is TruncationMode.FIXED:
            if self.dim is None:
                raise ValidationError("fixed truncation requires dim")
            validate_non_negative_integer(self.dim, "dim")
            if self.dim < 1:
                raise ValidationError(f"dim must be >= 1, got {self.dim}")
            if self.max_dim < self.dim:
                raise ValidationError(f"max_dim ({self.max_dim}) must be >= dim ({self.dim})")
        else:
            validate_finite(self.target_tail_mass, "target_tail_mass")
            if not 0.0 < self.target_tail_mass <= 1e-6:
                raise ValidationError(
                    f"target_tail_mass must lie in (0, 1e-6], got {self.target_tail_mass}"
                )

    @classmethod
    def fixed(cls, dim: int) -> 'TruncationPolicy':
        return cls(mode=TruncationMode.FIXED, dim=dim, max_dim=max(dim, 1))

    @classmethod
    def adaptive(cls, target_tail_mass: float = 1e-12, max_dim: int = 512) -> 'TruncationPolicy':
        return cls(mode=TruncationMode.ADAPTIVE, target_tail_mass=target_tail_mass, max_dim=max_dim)


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Simpson quadrature with Richardson refinement."""
    base_step: float = 0.02
    refine_factor: int = 8
    tolerance: float = 1e-9

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        validate_positive_number(self.base_step, "base_step", allow_zero=False)
        validate_non_negative_integer(self.refine_factor, "refine_factor")
        validate_finite(self.tolerance, "tolerance")
        if not 0.0 < self.tolerance <= 1e-4:
            raise ValidationError(f"tolerance must lie in (0, 1e-4], got {self.tolerance}")


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless description of the single-photon optomechanical cavity."""
    beta: float = 1.0
    gamma: float = 1.0
    big_gamma: float = 1.0
    phi: float = 0.0
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        validate_positive_number(self.beta, "beta")
        validate_positive_number(self.gamma, "gamma", allow_zero=False)
        validate_positive_number(self.big_gamma, "big_gamma")
        validate_finite(self.phi, "phi")
        limit = min(1.0 / self.gamma, 1.0) / 50.0
        if self.quad.base_step > limit * (1.0 + 1e-12):
            raise ValidationError(
                f"base_step {self.quad.base_step} exceeds min(1/gamma, 1)/50 = {limit:.6g}"
            )

    def with_beta(self, beta: float) -> 'SystemParams':
        """The same system with a different coupling (beta=0 is the fixed-mirror arm)."""
        return SystemParams(beta=beta, gamma=self.gamma, big_gamma=self.big_gamma,
                            phi=self.phi, policy=self.policy, quad=self.quad)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "big_gamma": self.big_gamma,
            "phi": self.phi,
            "truncation": self.policy.mode.value,
            "dim": self.policy.dim,
            "base_step": self.quad.base_step,
            "tolerance": self.quad.tolerance,
        }


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start Nelder-Mead settings for the subspace minimum."""
    n_starts: int = 32
    seed: int = 0
    rel_tolerance: float = 1e-6
    max_evaluations: int = 2000
    workers: int = 1

    def __post_init__(self):
        if validate_non_negative_integer(self.n_starts, "n_starts") < 1:
            raise ValidationError("n_starts must be >= 1")
        validate_non_negative_integer(self.seed, "seed")
        validate_positive_number(self.rel_tolerance, "rel_tolerance", allow_zero=False)
        if validate_non_negative_integer(self.max_evaluations, "max_evaluations") < 1:
            raise ValidationError("max_evaluations must be >= 1")
        if validate_non_negative_integer(self.workers, "workers") < 1:
            raise ValidationError("workers must be >= 1")


@dataclass(frozen=True)
class TargetState:
    """Target mirror state, expanded over displaced Fock states |n~> = D(beta)|n>."""
    coeffs: np.ndarray
    beta: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        object.__setattr__(self, "coeffs", coeffs)
        self.validate()

    def validate(self) -> None:
        if self.coeffs.size == 0:
            raise ValidationError("coeffs cannot be empty")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValidationError("coeffs must be finite")
        validate_positive_number(self.beta, "beta")
        norm = float(np.sum(np.abs(self.coeffs) ** 2))
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(f"coeffs must be normalized, sum |c_n|^2 = {norm!r}")

    @classmethod
    def from_unnormalized(cls, coeffs: Sequence[complex], beta: float) -> 'TargetState':
        values = np.asarray(coeffs, dtype=complex).ravel()
        norm = np.sqrt(np.sum(np.abs(values) ** 2))
        if not norm > 0:
            raise ValidationError("coeffs cannot all be zero")
        return cls(coeffs=values / norm, beta=beta)

    @classmethod
    def fock(cls, n: int, beta: float) -> 'TargetState':
        coeffs = np.zeros(validate_non_negative_integer(n, "n") + 1, dtype=complex)
        coeffs[n] = 1.0
        return cls(coeffs=coeffs, beta=beta)


@dataclass
class PrepReport:
    """Outcome of a conditional state preparation estimate."""
    window_delta_tau: float
    success_probability: float
    achieved_overlap: float
    normalization_z: float
    approximation_valid: bool = True

    def __post_init__(self):
        validate_positive_number(self.window_delta_tau, "window_delta_tau")
        validate_positive_number(self.success_probability, "success_probability")
        validate_positive_number(self.normalization_z, "normalization_z")
        validate_positive_number(self.achieved_overlap, "achieved_overlap")
        if self.achieved_overlap > 1.0:
            raise ValidationError(f"achieved_overlap must be <= 1, got {self.achieved_overlap}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "window_delta_tau": self.window_delta_tau,
            "success_probability": self.success_probability,
            "achieved_overlap": self.achieved_overlap,
            "normalization_z": self.normalization_z,
            "approximation_valid": self.approximation_valid,
        }


@dataclass
class SweepTable:
    """Ordered rows of parameters and observables, ready for CSV/JSON emission."""
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def __post_init__(self):
        if not self.header:
            raise ValidationError("header cannot be empty")
        if len(set(self.header)) != len(self.header):
            raise ValidationError(f"duplicate column names in header: {self.header}")
        for row in self.rows:
            self._check_width(row)

    def _check_width(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.header):
            raise ValidationError(
                f"row has {len(row)} fields, header has {len(self.header)}"
            )

    def append(self, row: Sequence[Any]) -> None:
        self._check_width(row)
        self.rows.append(list(row))

    def column(self, name: str) -> List[Any]:
        if name not in self.header:
            raise ValidationError(f"unknown column: {name}")
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.header, row)) for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)
