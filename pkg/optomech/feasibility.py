"""
Laboratory units for the optomechanical interferometer.

Converts a physical cavity and mirror into the dimensionless coupling beta and
bandwidth gamma / omega_m, and checks the experimental requirements: a strong
enough single-photon kick, a resolved mechanical sideband, a linear cavity
response over the zero-point motion, and weak thermal decoherence.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import scipy.constants as const

from .models import QuadratureConfig, SystemParams, TruncationPolicy, ValidationError, validate_positive_number


logger = logging.getLogger(__name__)

hbar = const.hbar
c = const.c
k_B = const.k


@dataclass(frozen=True)
class PhysicalParams:
    """Cavity, mirror and environment in SI units (mech_freq in rad/s)."""
    wavelength: float
    cavity_length: float
    mirror_mass: float
    mech_freq: float
    transmissivity: float
    quality: float
    temperature: float
    # Defaults to 2 pi / transmissivity when omitted
    finesse: Optional[float] = None

    def __post_init__(self):
        for name in ("wavelength", "cavity_length", "mirror_mass", "mech_freq", "quality", "temperature"):
            validate_positive_number(getattr(self, name), name, allow_zero=False)
        validate_positive_number(self.transmissivity, "transmissivity", allow_zero=False)
        if self.transmissivity >= 1.0:
            raise ValidationError(f"transmissivity must lie in (0, 1), got {self.transmissivity}")
        if self.finesse is not None:
            validate_positive_number(self.finesse, "finesse", allow_zero=False)

    @property
    def optical_freq(self) -> float:
        """omega_0 = 2 pi c / lambda."""
        return 2.0 * math.pi * c / self.wavelength

    @property
    def coupling(self) -> float:
        """k = omega_0 / L, shift of the cavity frequency per unit mirror displacement."""
        return self.optical_freq / self.cavity_length

    @property
    def bandwidth(self) -> float:
        """gamma = c T / (2 L) in rad/s."""
        return c * self.transmissivity / (2.0 * self.cavity_length)

    @property
    def zero_point_length(self) -> float:
        """sqrt(hbar / (2 m omega_m))."""
        return math.sqrt(hbar / (2.0 * self.mirror_mass * self.mech_freq))

    @property
    def effective_finesse(self) -> float:
        return self.finesse if self.finesse is not None else 2.0 * math.pi / self.transmissivity

    def with_changes(self, **changes) -> 'PhysicalParams':
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return PhysicalParams(**values)


@dataclass
class RequirementCheck:
    """One inequality lhs < rhs (or lhs >= rhs), both sides in SI units."""
    name: str
    lhs: float
    rhs: float
    relation: str
    unit: str
    passed: bool
    margin: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "unit": self.unit,
            "passed": self.passed,
            "margin": self.margin,
        }


@dataclass
class FeasibilityReport:
    beta: float
    beta_momentum_kick: float
    gamma_over_omega: float
    zero_point_length: float
    finesse: float
    checks: List[RequirementCheck] = field(default_factory=list)

    @property
    def beta_ratio(self) -> float:
        return self.beta_momentum_kick / self.beta

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> RequirementCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "beta_momentum_kick": self.beta_momentum_kick,
            "beta_ratio": self.beta_ratio,
            "gamma_over_omega": self.gamma_over_omega,
            "zero_point_length": self.zero_point_length,
            "finesse": self.finesse,
            "all_passed": self.all_passed,
            "checks": [check.to_dict() for check in self.checks],
        }


def beta_from_coupling(p: PhysicalParams) -> float:
    """beta = k x_zpf / omega_m."""
    return p.coupling * p.zero_point_length / p.mech_freq


def beta_from_momentum_kick(p: PhysicalParams) -> float:
    """
    Photon momentum hbar omega_0 / c over the zero-point momentum spread
    sqrt(hbar m omega_m / 2), per round trip 2 L / c, per mechanical period.
    """
    kick = hbar * p.optical_freq / c
    spread = math.sqrt(2.0 / (hbar * p.mirror_mass * p.mech_freq))
    round_trips = c / (2.0 * p.mech_freq * p.cavity_length)
    return kick * spread * round_trips


def derive_dimensionless(
    p: PhysicalParams,
    big_gamma: float = 1.0,
    phi: float = 0.0,
    policy: Optional[TruncationPolicy] = None,
) -> SystemParams:
    """SystemParams with beta and gamma = c T / (2 L omega_m); times in units of 1/omega_m."""
    gamma = p.bandwidth / p.mech_freq
    base_step = min(QuadratureConfig().base_step, min(1.0 / gamma, 1.0) / 50.0)
    return SystemParams(
        beta=beta_from_coupling(p),
        gamma=gamma,
        big_gamma=big_gamma,
        phi=phi,
        policy=policy or TruncationPolicy(),
        quad=QuadratureConfig(base_step=base_step),
    )


def _check(name: str, lhs: float, rhs: float, relation: str, unit: str) -> RequirementCheck:
    if relation == "<":
        passed, margin = lhs < rhs, rhs / lhs
    elif relation == ">=":
        passed, margin = lhs >= rhs, lhs / rhs
    else:
        passed, margin = lhs > rhs, lhs / rhs
    return RequirementCheck(name=name, lhs=lhs, rhs=rhs, relation=relation, unit=unit,
                            passed=passed, margin=margin)


def requirements_report(p: PhysicalParams) -> FeasibilityReport:
    """
    Checks, in order:
      strong_coupling: beta >= 1 (the displaced-Fock expansion of the prepared state converges)
      resolved_sideband: gamma < omega_m
      linear_range: lambda / (2 F) < x_zpf (cavity stays linear over the zero-point motion)
      thermal: Q > k_B T_E / (hbar omega_m)
    """
    beta = beta_from_coupling(p)
    finesse = p.effective_finesse
    checks = [
        _check("strong_coupling", beta, 1.0, ">=", "1"),
        _check("resolved_sideband", p.bandwidth, p.mech_freq, "<", "rad/s"),
        _check("linear_range", p.wavelength / (2.0 * finesse), p.zero_point_length, "<", "m"),
        _check("thermal", p.quality, k_B * p.temperature / (hbar * p.mech_freq), ">", "1"),
    ]
    report = FeasibilityReport(
        beta=beta,
        beta_momentum_kick=beta_from_momentum_kick(p),
        gamma_over_omega=p.bandwidth / p.mech_freq,
        zero_point_length=p.zero_point_length,
        finesse=finesse,
        checks=checks,
    )
    failed = [check.name for check in checks if not check.passed]
    logger.info(f"Feasibility: beta={beta:.4g}, gamma/omega_m={report.gamma_over_omega:.4g}, "
                f"failed checks: {failed or 'none'}")
    return report
