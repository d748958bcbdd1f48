"""
Michelson interferometer with one optomechanical arm (A) and one fixed arm (B).

Both arms see the same photon. Arm A's mirror-conditioned state is the outgoing
state of the optomechanical cavity; arm B is the same cavity with beta = 0, for
which the mirror only evolves freely. The detector port combines the two with
the relative phase phi.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .fock_core import FockVector, free_phase_factors
from .models import NumericalError, SweepTable, SystemParams, validate_finite, validate_positive_number
from .open_dynamics import CavityPropagator
from .parallel_executor import ParallelExecutor
from .quadrature import integrate
from .waveforms import PhotonWaveform


logger = logging.getLogger(__name__)

VISIBILITY_FLOOR = 1e-300

VISIBILITY_HEADER = ["tau", "p_max", "p_min", "v"]


class UndefinedVisibilityError(NumericalError):
    """Raised when both arm states vanish and the visibility has no value."""
    pass


@dataclass(frozen=True)
class ArmOverlaps:
    """Norms and cross overlap of the two arm states at one time."""
    norm_a: float
    norm_b: float
    cross: complex

    @property
    def total(self) -> float:
        return self.norm_a + self.norm_b

    def density(self, phi: float) -> float:
        """(|A|^2 + |B|^2 + 2 Re(e^{i phi} <A|B>)) / 4, clipped at 0."""
        value = (self.total + 2.0 * float(np.real(np.exp(1j * phi) * self.cross))) / 4.0
        return max(value, 0.0)

    def extrema(self) -> Tuple[float, float]:
        cross = abs(self.cross)
        return (self.total + 2.0 * cross) / 4.0, max((self.total - 2.0 * cross) / 4.0, 0.0)

    def visibility(self) -> float:
        if self.norm_a < VISIBILITY_FLOOR and self.norm_b < VISIBILITY_FLOOR:
            raise UndefinedVisibilityError("both arm states vanish; visibility is undefined")
        return min(1.0, 2.0 * abs(self.cross) / self.total)


def arm_states(
    t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector
) -> Tuple[FockVector, FockVector]:
    """
    Unnormalized mirror states psi_A(t), psi_B(t) conditioned on detection at time t.

    psi_A = F(-t) U_m(t) phi0 - gamma int_0^t e^{-gamma (t-u)/2} F(-u) O(t-u) U_m(t) phi0 du,
    with O(s) = U_gamma(s) U_m(-s). psi_B is the beta -> 0 image, integrated on the
    same nodes as psi_A so that discretization errors cancel in <psi_A|psi_B>.
    """
    t = validate_positive_number(t, "t")
    propagator = CavityPropagator(waveform, params, phi0)
    dim = propagator.dim
    prompt = propagator.prompt(t)
    if t == 0:
        return FockVector(prompt), FockVector(prompt)

    arm_a = propagator.tail_integrand(t)
    gamma = params.gamma

    def stacked(u: np.ndarray) -> np.ndarray:
        fixed = gamma * np.exp(-gamma * (t - u) / 2.0) * waveform.arrival(u)
        return np.concatenate([arm_a(u), fixed[:, None]], axis=1)

    combined = integrate(stacked, 0.0, t, params.quad)
    tail_a = propagator.frame.from_frame(combined[None, :dim])[0]
    tail_b = combined[dim] * free_phase_factors(t, dim) * propagator.phi0
    return FockVector(prompt - tail_a), FockVector(prompt - tail_b)


def arm_overlaps(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> ArmOverlaps:
    psi_a, psi_b = arm_states(t, waveform, params, phi0)
    return ArmOverlaps(psi_a.norm_squared(), psi_b.norm_squared(), psi_a.inner(psi_b))


def probability_density(
    t: float, phi: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector
) -> float:
    """p(t) = (|A|^2 + |B|^2 + 2 Re(e^{i phi} <A|B>)) / 4."""
    phi = validate_finite(phi, "phi")
    return arm_overlaps(t, waveform, params, phi0).density(phi)


def p_extrema(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> Tuple[float, float]:
    """Maximum and minimum of p(t) over the detuning phase."""
    return arm_overlaps(t, waveform, params, phi0).extrema()


def visibility(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> float:
    """Instantaneous fringe visibility 2|<A|B>| / (|A|^2 + |B|^2)."""
    return arm_overlaps(t, waveform, params, phi0).visibility()


def _series_row(tau: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> list:
    overlaps = arm_overlaps(tau, waveform, params, phi0)
    p_max, p_min = overlaps.extrema()
    return [tau, p_max, p_min, overlaps.visibility()]


def visibility_series(
    waveform: PhotonWaveform,
    params: SystemParams,
    phi0: FockVector,
    tau_grid: Sequence[float],
    workers: int = 1,
) -> SweepTable:
    """
    Rows (tau, p_max, p_min, v) over tau_grid, in grid order.

    Grid points are independent; with workers > 1 they are spread over a thread pool.
    """
    taus = [validate_positive_number(float(tau), "tau") for tau in tau_grid]
    executor = ParallelExecutor(max_workers=workers)
    results = executor.map_ordered(lambda tau: _series_row(tau, waveform, params, phi0), taus)
    table = SweepTable(header=list(VISIBILITY_HEADER))
    for result in results:
        if not result.success:
            raise result.exception
        table.append(result.value)
    logger.info(f"Visibility series: {len(table)} points for beta={params.beta:g}, {waveform.describe()}")
    return table


def default_tau_grid(tau_max: float = 4.0 * math.pi, d_tau: float = math.pi / 200.0) -> np.ndarray:
    """Uniform tau grid starting at 0 with step d_tau, including tau_max when it lands on the grid."""
    tau_max = validate_positive_number(tau_max, "tau_max")
    d_tau = validate_positive_number(d_tau, "d_tau", allow_zero=False)
    count = int(math.floor(tau_max / d_tau + 1e-9)) + 1
    return d_tau * np.arange(count)
