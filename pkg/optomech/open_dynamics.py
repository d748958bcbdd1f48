"""
Exact single-photon dynamics of the optomechanical cavity.

While the photon is outside, the mirror evolves freely under U_m. While it is in
the cavity, the mirror evolves under U_gamma, whose eigenstates are the displaced
Fock states. The cavity leaks at rate gamma, and the outgoing wave at the
front mirror obeys the junction condition

    psi1(0+, s) = F(-s) U_m(s) phi0 - sqrt(gamma) psi2(s)

so the prompt reflection is added analytically and only the smooth tail
gamma e^{-gamma (s-u)/2} U_gamma(s-u) F(-u) U_m(u) phi0 goes through quadrature.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from .fock_core import DisplacedFrame, FockVector, TruncationError, free_phase_factors, resolve_dimension
from .models import (
    DomainError,
    QuadratureConfig,
    SystemParams,
    TruncationMode,
    ValidationError,
    validate_finite,
    validate_positive_number,
)
from .quadrature import RICHARDSON_DIVISOR, QuadratureError, damped_cumulative, integrate
from .waveforms import PhotonWaveform


logger = logging.getLogger(__name__)

PHI0_TOLERANCE = 1e-8


def green_prompt_and_tail(dt: float, gamma: float) -> Tuple[float, float]:
    """
    Weights of the cavity Green function: the prompt (delta) weight and the
    exponential tail magnitude gamma e^{-gamma dt / 2}. Callers subtract the tail.
    """
    dt = validate_positive_number(dt, "dt")
    gamma = validate_positive_number(gamma, "gamma", allow_zero=False)
    return 1.0, gamma * math.exp(-gamma * dt / 2.0)


def reflection_amplitude(
    t: float,
    waveform: PhotonWaveform,
    gamma: float,
    quad: Optional[QuadratureConfig] = None,
    closed_form: bool = True,
) -> complex:
    """
    Scalar reflection amplitude r(t) of a fixed mirror cavity (beta = 0).

    The outgoing state at the front mirror is r(t) U_m(t) phi0 with
    r(t) = F(-t) - gamma int_0^t e^{-gamma (t-u)/2} F(-u) du.
    The closed form is used when the waveform has one, quadrature otherwise.
    """
    t = validate_positive_number(t, "t")
    gamma = validate_positive_number(gamma, "gamma", allow_zero=False)
    response = waveform.filtered_response(t, gamma) if closed_form else None
    if response is None:
        quad = quad or QuadratureConfig()
        response = complex(integrate(
            lambda u: np.exp(-gamma * (t - u) / 2.0) * waveform.arrival(u), 0.0, t, quad
        ))
    return complex(waveform.arrival(t)) - gamma * response


def _working_dimension(params: SystemParams, phi0: FockVector) -> int:
    occupations = np.arange(phi0.dim)
    mean = float(np.sum(occupations * np.abs(phi0.amplitudes) ** 2))
    radius = 2.0 * params.beta + math.sqrt(mean)
    dim = resolve_dimension(params.policy, radius, floor=2)
    if params.policy.mode is TruncationMode.ADAPTIVE:
        dim = max(dim, phi0.dim)
    return dim


def _check_phi0(phi0: FockVector) -> None:
    if not isinstance(phi0, FockVector):
        raise ValidationError(f"phi0 must be a FockVector, got {type(phi0).__name__}")
    if abs(phi0.norm_squared() - 1.0) > PHI0_TOLERANCE:
        raise ValidationError(f"phi0 must be normalized, norm^2 = {phi0.norm_squared()!r}")


@dataclass
class BoundarySeries:
    """In-cavity and outgoing front-mirror states on a uniform time grid."""
    times: np.ndarray
    in_cavity: np.ndarray
    outgoing: np.ndarray
    outgoing_mass: float
    refinements: int = 0

    def in_cavity_state(self, index: int) -> FockVector:
        return FockVector(self.in_cavity[index])

    def outgoing_state(self, index: int) -> FockVector:
        return FockVector(self.outgoing[index])


@dataclass
class JointStateSnapshot:
    """Joint photon-mirror state at time t."""
    t: float
    psi1: Dict[float, FockVector]
    psi2: FockVector
    ingoing_mass: float
    outgoing_mass: float

    def total_probability(self) -> float:
        return self.ingoing_mass + self.outgoing_mass + self.psi2.norm_squared()

    def to_dict(self) -> Dict[str, float]:
        return {
            "t": self.t,
            "grid_points": len(self.psi1),
            "ingoing_mass": self.ingoing_mass,
            "outgoing_mass": self.outgoing_mass,
            "in_cavity_mass": self.psi2.norm_squared(),
            "total_probability": self.total_probability(),
        }


class CavityPropagator:
    """
    Evaluates the joint state for one waveform, system and initial mirror state.

    Integrands are assembled in the displaced-Fock eigenbasis of the
    photon-present Hamiltonian, where U_gamma is diagonal.
    """

    def __init__(self, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector):
        _check_phi0(phi0)
        self.waveform = waveform
        self.params = params
        self.dim = _working_dimension(params, phi0)
        try:
            self.phi0 = phi0.padded(self.dim).amplitudes
        except TruncationError as e:
            raise TruncationError(f"phi0 does not fit the fixed truncation: {e}") from e
        self.frame = DisplacedFrame(params.beta, self.dim)
        self.rates = params.gamma / 2.0 + 1j * self.frame.levels
        logger.debug(f"Propagator for {waveform.describe()} at dim {self.dim}")

    def driven_rows(self, u: np.ndarray) -> np.ndarray:
        """Rows F(-u) U_m(u) phi0 in the number basis."""
        u = np.asarray(u, dtype=float)
        phases = np.exp(-1j * np.outer(u, self.frame.free_levels))
        return self.waveform.arrival(u)[:, None] * phases * self.phi0[None, :]

    def driven_frame_rows(self, u: np.ndarray) -> np.ndarray:
        """Rows D^dag F(-u) U_m(u) phi0."""
        return self.frame.to_frame(self.driven_rows(u))

    def tail_integrand(self, s: float) -> Callable[[np.ndarray], np.ndarray]:
        """u -> gamma e^{-(gamma/2 + i E)(s - u)} D^dag F(-u) U_m(u) phi0, eigenbasis rows."""
        gamma = self.params.gamma

        def integrand(u: np.ndarray) -> np.ndarray:
            kernel = gamma * np.exp(-np.outer(s - u, self.rates))
            return kernel * self.driven_frame_rows(u)

        return integrand

    def prompt(self, s: float) -> np.ndarray:
        return complex(self.waveform.arrival(s)) * free_phase_factors(s, self.dim) * self.phi0

    def tail(self, s: float) -> np.ndarray:
        """gamma int_0^s e^{-gamma (s-u)/2} U_gamma(s-u) F(-u) U_m(u) phi0 du."""
        if s == 0:
            return np.zeros(self.dim, dtype=complex)
        eigen = integrate(self.tail_integrand(s), 0.0, s, self.params.quad)
        return self.frame.from_frame(eigen[None, :])[0]

    def boundary(self, s: float, include_tail: bool = True) -> np.ndarray:
        """Outgoing state just outside the front mirror at time s."""
        state = self.prompt(s)
        if include_tail:
            state = state - self.tail(s)
        return state

    def _series_level(self, t_max: float, intervals: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        step = t_max / intervals
        times = np.linspace(0.0, t_max, intervals + 1)
        mids = times[:-1] + step / 2.0
        running = damped_cumulative(
            self.driven_frame_rows(times), self.driven_frame_rows(mids), self.rates, step
        )
        in_cavity = math.sqrt(self.params.gamma) * self.frame.from_frame(running)
        outgoing = self.driven_rows(times) - math.sqrt(self.params.gamma) * in_cavity
        return times, in_cavity, outgoing

    def series(self, t_max: float) -> BoundarySeries:
        """
        In-cavity and outgoing states on a uniform grid over [0, t_max], refined by
        step doubling until both the states and the outgoing mass settle.
        """
        quad = self.params.quad
        intervals = max(2, int(math.ceil(t_max / quad.base_step)))
        intervals += intervals % 2
        times, in_cavity, outgoing = self._series_level(t_max, intervals)
        mass = float(simpson(np.sum(np.abs(outgoing) ** 2, axis=1), x=times))

        change = math.inf
        for level in range(quad.refine_factor):
            _, fine_cavity, fine_out = self._series_level(t_max, 2 * intervals)
            fine_mass = float(simpson(np.sum(np.abs(fine_out) ** 2, axis=1), x=np.linspace(0.0, t_max, 2 * intervals + 1)))
            change = max(
                float(np.max(np.abs(fine_cavity[::2] - in_cavity))),
                float(np.max(np.abs(fine_out[::2] - outgoing))),
                abs(fine_mass - mass),
            )
            if change <= quad.tolerance:
                return BoundarySeries(
                    times=times,
                    in_cavity=fine_cavity[::2] + (fine_cavity[::2] - in_cavity) / RICHARDSON_DIVISOR,
                    outgoing=fine_out[::2] + (fine_out[::2] - outgoing) / RICHARDSON_DIVISOR,
                    outgoing_mass=fine_mass + (fine_mass - mass) / RICHARDSON_DIVISOR,
                    refinements=level + 1,
                )
            intervals *= 2
            in_cavity, outgoing, mass = fine_cavity, fine_out, fine_mass
            times = np.linspace(0.0, t_max, intervals + 1)
            logger.debug(f"Series on [0, {t_max:.4g}] refined to {intervals} intervals (change {change:.2e})")

        raise QuadratureError(
            f"boundary series on [0, {t_max:.6g}] did not converge after {quad.refine_factor} "
            f"refinements: last change {change:.3e} > tolerance {quad.tolerance:.1e}"
        )


def out_state(
    t: float,
    x: float,
    waveform: PhotonWaveform,
    params: SystemParams,
    phi0: FockVector,
    include_tail: bool = True,
) -> FockVector:
    """
    Mirror state |psi1(x, t)> entangled with an outgoing photon at x > 0, for t > x.

    Equals U_m(x) psi1(0+, t - x): the prompt term F(x - t) U_m(t) phi0 minus the
    cavity tail integral.

    Raises:
        DomainError: If x < 0 or t <= x
    """
    t = validate_finite(t, "t")
    x = validate_finite(x, "x")
    if x < 0:
        raise DomainError(f"x must be >= 0 for the outgoing wave, got {x}")
    if t <= x:
        raise DomainError(f"out_state needs t > x, got t={t}, x={x}")
    propagator = CavityPropagator(waveform, params, phi0)
    boundary = propagator.boundary(t - x, include_tail=include_tail)
    return FockVector(free_phase_factors(x, propagator.dim) * boundary)


def in_cavity_state(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> FockVector:
    """|psi2(t)> = sqrt(gamma) int_0^t e^{-gamma (t-u)/2} U_gamma(t-u) F(-u) U_m(u) phi0 du."""
    t = validate_positive_number(t, "t")
    propagator = CavityPropagator(waveform, params, phi0)
    return FockVector(propagator.tail(t) / math.sqrt(params.gamma))


def boundary_series(t_max: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> BoundarySeries:
    t_max = validate_positive_number(t_max, "t_max", allow_zero=False)
    return CavityPropagator(waveform, params, phi0).series(t_max)


def in_cavity_series(
    t_max: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector
) -> Tuple[np.ndarray, np.ndarray]:
    """psi2 on a uniform grid over [0, t_max] (rows), via the cumulative eigenbasis path."""
    series = boundary_series(t_max, waveform, params, phi0)
    return series.times, series.in_cavity


def out_state_series(
    t_max: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector
) -> Tuple[np.ndarray, np.ndarray]:
    """psi1(0+, s) on a uniform grid over [0, t_max] (rows)."""
    series = boundary_series(t_max, waveform, params, phi0)
    return series.times, series.outgoing


def probability_audit(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> float:
    """
    Total probability at time t: ingoing mass (x < 0), outgoing mass (0 < x < t)
    and the in-cavity norm. Expected to equal 1.
    """
    t = validate_positive_number(t, "t")
    _check_phi0(phi0)
    ingoing = waveform.ingoing_mass(t)
    if t == 0:
        return ingoing
    series = boundary_series(t, waveform, params, phi0)
    in_cavity = float(np.sum(np.abs(series.in_cavity[-1]) ** 2))
    return ingoing + series.outgoing_mass + in_cavity


def joint_snapshot(t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector) -> JointStateSnapshot:
    """
    Full joint state at time t on an x-grid of step base_step over region 0 < x < t,
    using psi1(x, t) = U_m(x) psi1(0+, t - x).
    """
    t = validate_positive_number(t, "t", allow_zero=False)
    propagator = CavityPropagator(waveform, params, phi0)
    series = propagator.series(t)
    psi1 = {}
    for index in range(len(series.times) - 1, -1, -1):
        x = float(t - series.times[index])
        psi1[x] = FockVector(free_phase_factors(x, propagator.dim) * series.outgoing[index])
    snapshot = JointStateSnapshot(
        t=t,
        psi1=psi1,
        psi2=FockVector(series.in_cavity[-1]),
        ingoing_mass=waveform.ingoing_mass(t),
        outgoing_mass=series.outgoing_mass,
    )
    logger.debug(f"Snapshot at t={t:.4g}: total probability {snapshot.total_probability():.12f}")
    return snapshot
