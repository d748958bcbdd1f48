"""
Conditional preparation of mirror states.

Arm B of the interferometer is a plain mirror and the detuning is set so the
prompt reflections of both arms cancel at the dark port. A click there at
time t leaves the mirror in half the cavity-A tail integral. Shaping the
photon waveform steers that state: a rising exponential with carrier offset
(n - beta^2) yields the displaced Fock state |n~> at t = 2 pi, and a periodic
modulation of it yields any superposition with fast-decaying coefficients.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .fock_core import FockVector, coherent_amplitudes, coherent_fock_overlap, coherent_fock_overlaps, resolve_dimension
from .models import (
    NumericalError,
    OptimizerConfig,
    PrepReport,
    QuadratureConfig,
    SystemParams,
    TargetState,
    TruncationPolicy,
    ValidationError,
    validate_finite,
    validate_non_negative_integer,
    validate_positive_number,
    validate_probability,
)
from .open_dynamics import CavityPropagator
from .parallel_executor import ParallelExecutor
from .quadrature import integrate
from .waveforms import FockPrep, ModulatedPrep, PhotonWaveform


logger = logging.getLogger(__name__)

OPTIMAL_GAMMA_OVER_OMEGA = 3.0 / (2.0 * math.pi)

DEGENERATE_OVERLAP = 1.0 - 1e-12
GENERIC_FLOOR = 1e-8
PENALTY = 1e6
MAX_EPSILON = 0.5


class DegenerateTargetError(ValidationError):
    """Raised when the target coincides with the initial coherent state and no window exists."""
    pass


class NongenericTargetError(ValidationError):
    """Raised when sum_n c~_n vanishes, so the fidelity window diverges."""
    pass


class DivergentCoefficientsError(NumericalError):
    """Raised when c~_n = c_n / <-beta|n> overflows or Z^2 is not a positive number."""
    pass


class OptimizerError(NumericalError):
    """Raised when no optimizer start reaches a value off the penalty region."""
    pass


@dataclass
class ConditionalResult:
    """Unnormalized conditional mirror state and its detection-probability density."""
    state: FockVector
    density: float

    def normalized(self) -> FockVector:
        return self.state.normalize()


@dataclass
class SubspaceMinimum:
    """Worst-case success probability over the span of |0~> .. |j~>."""
    value: float
    coefficients: np.ndarray
    start_index: int
    evaluations: int
    converged_starts: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
            "start_index": self.start_index,
            "evaluations": self.evaluations,
            "converged_starts": self.converged_starts,
        }


def bandwidth_factor(gamma_over_omega: float) -> float:
    """(pi x)^3 e^{-2 pi x}, maximal at x = 3 / (2 pi)."""
    x = validate_positive_number(gamma_over_omega, "gamma_over_omega")
    return (math.pi * x) ** 3 * math.exp(-2.0 * math.pi * x)


def fock_prep_waveform(n: int, beta: float, gamma: float) -> FockPrep:
    """F(x) = sqrt(gamma) e^{(gamma/2 - i beta^2 + i n) x} for x <= 0."""
    return FockPrep(n, beta, gamma)


def conditional_state(
    t: float, waveform: PhotonWaveform, params: SystemParams, phi0: FockVector
) -> ConditionalResult:
    """
    Dark-port conditional state (1/2) int_0^t g_p(t, u) O(t-u) U_m(t) phi0 du,
    g_p(t, u) = gamma e^{-gamma (t-u)/2} F(-u).
    """
    t = validate_positive_number(t, "t")
    propagator = CavityPropagator(waveform, params, phi0)
    state = FockVector(0.5 * propagator.tail(t))
    return ConditionalResult(state=state, density=state.norm_squared())


def circle_integral(
    n: int,
    beta: float,
    upper_phi: float,
    policy: TruncationPolicy,
    quad: Optional[QuadratureConfig] = None,
) -> FockVector:
    """int_0^upper e^{-i n phi} |-beta e^{i phi}> d phi, by quadrature."""
    n = validate_non_negative_integer(n, "n")
    beta = validate_positive_number(beta, "beta")
    upper_phi = validate_finite(upper_phi, "upper_phi")
    if not 0.0 <= upper_phi <= 2.0 * math.pi + 1e-12:
        raise ValidationError(f"upper_phi must lie in [0, 2 pi], got {upper_phi}")
    quad = quad or QuadratureConfig()
    dim = resolve_dimension(policy, beta, floor=n + 2)
    base = coherent_amplitudes(-beta, dim)
    orders = np.arange(dim) - n

    def integrand(phi: np.ndarray) -> np.ndarray:
        return np.exp(1j * np.outer(phi, orders)) * base[None, :]

    return FockVector(integrate(integrand, 0.0, upper_phi, quad))


def _check_epsilon(epsilon: float) -> float:
    return validate_probability(epsilon, "epsilon", 0.0, MAX_EPSILON)


def _fock_overlap(n: int, beta: float) -> float:
    overlap = coherent_fock_overlap(-beta, n)
    if abs(overlap) >= DEGENERATE_OVERLAP:
        raise DegenerateTargetError(f"|<-beta|{n}>| = {abs(overlap):.15g}: target equals the initial state")
    return overlap


def fidelity_window_fock(n: int, beta: float, epsilon: float) -> float:
    """Arrival window around 2 pi keeping overlap >= 1 - epsilon with |n~>."""
    n = validate_non_negative_integer(n, "n")
    beta = validate_positive_number(beta, "beta")
    epsilon = _check_epsilon(epsilon)
    overlap = _fock_overlap(n, beta)
    return math.sqrt(8.0 * math.pi ** 2 * epsilon) * abs(overlap) / math.sqrt(1.0 - overlap ** 2)


def _warn_breakdown(probability: float, label: str) -> bool:
    if probability > 1.0:
        logger.warning(f"{label}: success probability {probability:.4g} > 1, the window approximation breaks down")
        return False
    return True


def success_probability_fock(
    n: int, beta: float, epsilon: float, gamma_over_omega: float = OPTIMAL_GAMMA_OVER_OMEGA
) -> float:
    """2 sqrt(8 eps) (pi x)^3 e^{-2 pi x} |<-beta|n>|^3 / sqrt(1 - <-beta|n>^2), x = gamma/omega_m."""
    n = validate_non_negative_integer(n, "n")
    beta = validate_positive_number(beta, "beta")
    epsilon = _check_epsilon(epsilon)
    overlap = abs(_fock_overlap(n, beta))
    probability = (2.0 * math.sqrt(8.0 * epsilon) * bandwidth_factor(gamma_over_omega)
                   * overlap ** 3 / math.sqrt(1.0 - overlap ** 2))
    _warn_breakdown(probability, f"n={n}, beta={beta:g}")
    return probability


def tilde_coefficients(target: TargetState) -> np.ndarray:
    """c~_n = c_n / <-beta|n>; entries with c_n = 0 stay zero."""
    overlaps = coherent_fock_overlaps(-target.beta, target.coeffs.size)
    tilde = np.zeros(target.coeffs.size, dtype=complex)
    present = target.coeffs != 0
    if np.any(present & (overlaps == 0)):
        raise DivergentCoefficientsError(f"<-beta|n> vanishes for an occupied level at beta={target.beta}")
    with np.errstate(over="ignore", invalid="ignore"):
        tilde[present] = target.coeffs[present] / overlaps[present]
    if not np.all(np.isfinite(tilde)):
        raise DivergentCoefficientsError(f"c~_n overflow at beta={target.beta}")
    return tilde


def normalization_z(tilde: np.ndarray, gamma_over_omega: float) -> float:
    """Z with Z^2 = sum_jk c~_j c~_k^* / (1 + i (j - k) omega_m / gamma)."""
    x = validate_positive_number(gamma_over_omega, "gamma_over_omega", allow_zero=False)
    orders = np.arange(tilde.size)
    diff = orders[:, None] - orders[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        z_squared = np.sum(np.outer(tilde, np.conj(tilde)) / (1.0 + 1j * diff / x))
    if not (np.isfinite(z_squared.real) and z_squared.real > 0):
        raise DivergentCoefficientsError(f"Z^2 = {z_squared} is not a positive finite number")
    return math.sqrt(z_squared.real)


def arbitrary_prep_waveform(target: TargetState, gamma: float) -> Tuple[ModulatedPrep, float]:
    """Modulated rising exponential that prepares `target` at t = 2 pi; returns (waveform, Z)."""
    gamma = validate_positive_number(gamma, "gamma", allow_zero=False)
    tilde = tilde_coefficients(target)
    z = normalization_z(tilde, gamma)
    return ModulatedPrep(tilde, target.beta, gamma, z), z


def _state_report(target: TargetState, epsilon: float, gamma_over_omega: float) -> PrepReport:
    tilde = tilde_coefficients(target)
    tilde_sum = abs(np.sum(tilde))
    if tilde_sum <= GENERIC_FLOOR:
        raise NongenericTargetError(f"|sum c~_n| = {tilde_sum:.3e}: the fidelity window diverges")
    overlaps = coherent_fock_overlaps(-target.beta, target.coeffs.size)
    initial_overlap = abs(np.sum(target.coeffs * overlaps))
    if initial_overlap >= DEGENERATE_OVERLAP:
        raise DegenerateTargetError("target equals the initial coherent state; no window exists")
    z = normalization_z(tilde, gamma_over_omega)
    root = math.sqrt(1.0 - initial_overlap ** 2)
    window = math.sqrt(8.0 * math.pi ** 2 * epsilon) / (tilde_sum * root)
    probability = (2.0 * math.sqrt(8.0 * epsilon) * bandwidth_factor(gamma_over_omega)
                   / (tilde_sum * z ** 2 * root))
    return PrepReport(
        window_delta_tau=window,
        success_probability=probability,
        achieved_overlap=1.0 - epsilon,
        normalization_z=z,
        approximation_valid=probability <= 1.0,
    )


def success_probability_state(
    target: TargetState, epsilon: float, gamma_over_omega: float = OPTIMAL_GAMMA_OVER_OMEGA
) -> PrepReport:
    """
    Window and success probability for an arbitrary target.

    Raises:
        NongenericTargetError: If |sum c~_n| <= 1e-8
        DegenerateTargetError: If the target coincides with |-beta> up to phase
    """
    epsilon = _check_epsilon(epsilon)
    report = _state_report(target, epsilon, gamma_over_omega)
    _warn_breakdown(report.success_probability, f"target over {target.coeffs.size} levels, beta={target.beta:g}")
    return report


def _unpack(x: np.ndarray) -> np.ndarray:
    """Real vector (c0, Re c1, Im c1, ...) -> complex coefficients with c0 real."""
    coeffs = np.empty((x.size + 1) // 2, dtype=complex)
    coeffs[0] = x[0]
    coeffs[1:] = x[1::2] + 1j * x[2::2]
    return coeffs


def _pack(coeffs: np.ndarray) -> np.ndarray:
    if coeffs[0] != 0:
        coeffs = coeffs * np.conj(coeffs[0]) / abs(coeffs[0])
    x = np.empty(2 * coeffs.size - 1)
    x[0] = coeffs[0].real
    x[1::2] = coeffs[1:].real
    x[2::2] = coeffs[1:].imag
    return x


class SubspaceObjective:
    """
    Success probability over span{|0~> .. |j~>} as a function of packed real parameters.

    The overlaps <-beta|n> and the Z kernel 1 / (1 + i (j - k) omega_m / gamma)
    depend only on (j, beta), so they are built once per search. Targets off the
    generic region score PENALTY.
    """

    def __init__(self, j: int, beta: float, epsilon: float, gamma_over_omega: float = OPTIMAL_GAMMA_OVER_OMEGA):
        self.overlaps = coherent_fock_overlaps(-beta, j + 1)
        orders = np.arange(j + 1)
        self.kernel = 1.0 / (1.0 + 1j * (orders[:, None] - orders[None, :]) / gamma_over_omega)
        self.prefactor = 2.0 * math.sqrt(8.0 * epsilon) * bandwidth_factor(gamma_over_omega)
        self.occupiable = self.overlaps != 0
        self._divisor = np.where(self.occupiable, self.overlaps, 1.0)

    def __call__(self, x: np.ndarray) -> float:
        coeffs = _unpack(x)
        norm = np.linalg.norm(coeffs)
        if not norm > 1e-12:
            return PENALTY
        coeffs = coeffs / norm
        if np.any((coeffs != 0) & ~self.occupiable):
            return PENALTY
        with np.errstate(over="ignore", invalid="ignore"):
            tilde = coeffs / self._divisor
            tilde_sum = abs(np.sum(tilde))
            z_squared = float(np.real(tilde @ self.kernel @ np.conj(tilde)))
        initial_overlap = abs(np.dot(coeffs, self.overlaps))
        if not (math.isfinite(tilde_sum) and tilde_sum > GENERIC_FLOOR):
            return PENALTY
        if initial_overlap >= DEGENERATE_OVERLAP:
            return PENALTY
        if not (math.isfinite(z_squared) and z_squared > 0):
            return PENALTY
        return self.prefactor / (tilde_sum * z_squared * math.sqrt(1.0 - initial_overlap ** 2))


def _start_points(j: int, opt: OptimizerConfig, previous: Optional[np.ndarray] = None) -> list:
    """
    The previous subspace's minimizer (zero-padded) when given, then the basis
    states |0~> .. |j~>, then seeded Gaussian directions on the unit sphere.
    """
    starts = []
    if previous is not None:
        padded = np.zeros(j + 1, dtype=complex)
        padded[: previous.size] = previous
        starts.append(_pack(padded))
    for level in range(j + 1):
        coeffs = np.zeros(j + 1, dtype=complex)
        coeffs[level] = 1.0
        starts.append(_pack(coeffs))
    for child in np.random.SeedSequence(opt.seed).spawn(opt.n_starts):
        direction = np.random.default_rng(child).standard_normal(2 * j + 1)
        starts.append(direction / np.linalg.norm(direction))
    return starts


def _search_subspace(
    j: int, beta: float, epsilon: float, opt: OptimizerConfig, previous: Optional[SubspaceMinimum] = None
) -> SubspaceMinimum:
    objective = SubspaceObjective(j, beta, epsilon)
    n_params = 2 * j + 1
    options = {
        "maxfev": max(opt.max_evaluations, 200 * n_params),
        "xatol": 1e-8,
        "adaptive": n_params >= 9,
    }

    def run_start(x0: np.ndarray):
        fatol = max(opt.rel_tolerance * abs(objective(x0)), 1e-300)
        return minimize(objective, x0, method="Nelder-Mead", options=dict(options, fatol=fatol))

    warm = previous.coefficients if previous is not None else None
    results = ParallelExecutor(max_workers=opt.workers).map_ordered(run_start, _start_points(j, opt, warm))

    best = None
    evaluations = 0
    converged = 0
    for result in results:
        if not result.success:
            continue
        outcome = result.value
        evaluations += int(outcome.nfev)
        converged += int(bool(outcome.success))
        value = float(outcome.fun)
        if not np.isfinite(value) or value >= PENALTY:
            continue
        if best is None or value < best[0]:
            best = (value, result.index, _unpack(outcome.x))

    if previous is not None and (best is None or previous.value < best[0]):
        padded = np.zeros(j + 1, dtype=complex)
        padded[: previous.coefficients.size] = previous.coefficients
        best = (previous.value, 0, padded)
    if best is None:
        raise OptimizerError(f"no optimizer start left the penalty region (j={j}, beta={beta:g})")
    if converged == 0:
        logger.warning(f"No Nelder-Mead start met its tolerance for j={j}, beta={beta:g}; reporting best value")

    value, index, coeffs = best
    logger.debug(f"Subspace minimum j={j}, beta={beta:g}: {value:.6g} from start {index}")
    return SubspaceMinimum(
        value=value,
        coefficients=coeffs / np.linalg.norm(coeffs),
        start_index=index,
        evaluations=evaluations,
        converged_starts=converged,
    )


def subspace_minima(
    j_max: int, beta: float, epsilon: float, opt: Optional[OptimizerConfig] = None
) -> List[SubspaceMinimum]:
    """
    Minima over span{|0~> .. |j~>} for j = 1 .. j_max.

    Each search starts from the previous minimizer padded with a zero
    coefficient, so the values never increase with j.
    """
    j_max = validate_non_negative_integer(j_max, "j")
    if j_max < 1:
        raise ValidationError("j must be >= 1")
    beta = validate_positive_number(beta, "beta", allow_zero=False)
    epsilon = _check_epsilon(epsilon)
    opt = opt or OptimizerConfig()

    minima: List[SubspaceMinimum] = []
    for j in range(1, j_max + 1):
        minima.append(_search_subspace(j, beta, epsilon, opt, minima[-1] if minima else None))
    return minima


def min_success_over_subspace(j: int, beta: float, epsilon: float, opt: Optional[OptimizerConfig] = None) -> SubspaceMinimum:
    """
    Minimum success probability over all normalized targets in span{|0~>, .., |j~>}.

    Multi-start Nelder-Mead over 2j+1 real parameters (c0 real fixes the global
    phase), nested through the smaller subspaces. Non-generic targets get a large
    finite penalty. The result is the lowest value over all starts, ties going to
    the lower start index.
    """
    return subspace_minima(j, beta, epsilon, opt)[-1]
