"""
Truncated Fock-space linear algebra for the mirror.

States are complex amplitude vectors over the number basis |n>, operators are
dense complex matrices. The displacement operator is built from its closed-form
associated-Laguerre matrix elements.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import eval_genlaguerre, gammainc, gammaln

from .models import (
    NORMALIZATION_TOLERANCE,
    NumericalError,
    TruncationMode,
    TruncationPolicy,
    ValidationError,
    validate_finite,
    validate_non_negative_integer,
)


logger = logging.getLogger(__name__)

# Dense complex dim x dim matrix.
Operator = np.ndarray


class TruncationError(NumericalError):
    """Raised when the truncated basis cannot hold a state to the requested tail mass."""
    pass


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over the truncated number basis (index n = occupation)."""
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        values = np.array(self.amplitudes, dtype=complex).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "amplitudes", values)
        self.validate()

    def validate(self) -> None:
        if self.amplitudes.size < 1:
            raise ValidationError("FockVector needs dim >= 1")
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValidationError("FockVector amplitudes must be finite")
        if self.normalized and abs(self.norm_squared() - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(
                f"vector flagged normalized has norm^2 = {self.norm_squared()!r}"
            )

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def padded(self, dim: int) -> 'FockVector':
        """Zero-pad to dim. Shrinking is allowed only over vanishing amplitudes."""
        if dim == self.dim:
            return self
        if dim < self.dim:
            if np.any(self.amplitudes[dim:] != 0):
                raise TruncationError(f"cannot truncate a dim-{self.dim} state to {dim}")
            return FockVector(self.amplitudes[:dim], self.normalized)
        values = np.zeros(dim, dtype=complex)
        values[: self.dim] = self.amplitudes
        return FockVector(values, self.normalized)

    def inner(self, other: 'FockVector') -> complex:
        """<self|other>, zero-padding the shorter vector."""
        dim = max(self.dim, other.dim)
        return complex(np.vdot(self.padded(dim).amplitudes, other.padded(dim).amplitudes))

    def fidelity(self, other: 'FockVector') -> float:
        """|<self|other>| / (|self| |other|)."""
        denominator = self.norm() * other.norm()
        if denominator == 0:
            raise ValidationError("fidelity is undefined for a zero vector")
        return abs(self.inner(other)) / denominator

    def normalize(self) -> 'FockVector':
        norm = self.norm()
        if norm == 0:
            raise ValidationError("cannot normalize a zero vector")
        return FockVector(self.amplitudes / norm, normalized=True)

    def scaled(self, factor: complex) -> 'FockVector':
        return FockVector(self.amplitudes * factor)

    def apply(self, operator: Operator) -> 'FockVector':
        if operator.shape != (self.dim, self.dim):
            raise ValidationError(f"operator shape {operator.shape} does not match dim {self.dim}")
        return FockVector(operator @ self.amplitudes)

    def __add__(self, other: 'FockVector') -> 'FockVector':
        dim = max(self.dim, other.dim)
        return FockVector(self.padded(dim).amplitudes + other.padded(dim).amplitudes)

    def __sub__(self, other: 'FockVector') -> 'FockVector':
        return self + other.scaled(-1.0)

    @classmethod
    def basis(cls, n: int, dim: int) -> 'FockVector':
        validate_non_negative_integer(n, "n")
        if dim <= n:
            raise ValidationError(f"basis state |{n}> needs dim > {n}, got {dim}")
        values = np.zeros(dim, dtype=complex)
        values[n] = 1.0
        return cls(values, normalized=True)

    @classmethod
    def zeros(cls, dim: int) -> 'FockVector':
        return cls(np.zeros(dim, dtype=complex))


def poisson_tail(mean: float, dim: int) -> float:
    """Probability mass of a coherent state with |alpha|^2 = mean beyond index dim-1."""
    if mean <= 0:
        return 0.0
    return float(gammainc(dim, mean))


def resolve_dimension(policy: TruncationPolicy, radius: float, floor: int = 1) -> int:
    """
    Pick a truncation dimension for states within `radius` of the phase-space origin.

    Adaptive policies start from ceil((radius + 4)^2) + 8 and grow until the
    coherent-state tail beyond the cut is below the target.
    """
    radius = abs(validate_finite(radius, "radius"))
    if policy.mode is TruncationMode.FIXED:
        if policy.dim < floor:
            raise TruncationError(f"fixed dim {policy.dim} is below the required {floor}")
        return policy.dim

    dim = max(floor, int(math.ceil((radius + 4.0) ** 2)) + 8)
    dim = min(dim, policy.max_dim) if floor <= policy.max_dim else dim
    if dim > policy.max_dim:
        raise TruncationError(f"required dim {dim} exceeds max_dim {policy.max_dim}")
    mean = radius ** 2
    while poisson_tail(mean, dim) > policy.target_tail_mass:
        if dim >= policy.max_dim:
            raise TruncationError(
                f"max_dim {policy.max_dim} cannot hold radius {radius:.4g} "
                f"to tail mass {policy.target_tail_mass:.1e}"
            )
        dim = min(policy.max_dim, dim + max(8, dim // 4))
    return dim


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """alpha^n e^{-|alpha|^2/2} / sqrt(n!) for n < dim."""
    values = np.zeros(dim, dtype=complex)
    if alpha == 0:
        values[0] = 1.0
        return values
    n = np.arange(dim)
    magnitude = abs(alpha)
    log_mag = n * math.log(magnitude) - 0.5 * gammaln(n + 1) - 0.5 * magnitude ** 2
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_fock_overlap(alpha: float, n: int) -> float:
    """<alpha|n> for real alpha: alpha^n e^{-alpha^2/2} / sqrt(n!)."""
    validate_non_negative_integer(n, "n")
    alpha = validate_finite(alpha, "alpha")
    if alpha == 0:
        return 1.0 if n == 0 else 0.0
    sign = -1.0 if (alpha < 0 and n % 2 == 1) else 1.0
    return sign * math.exp(n * math.log(abs(alpha)) - 0.5 * alpha ** 2 - 0.5 * math.lgamma(n + 1))


def coherent_fock_overlaps(alpha: float, count: int) -> np.ndarray:
    """<alpha|n> for n = 0 .. count-1."""
    return np.array([coherent_fock_overlap(alpha, n) for n in range(count)])


def coherent_state(alpha: complex, policy: TruncationPolicy) -> FockVector:
    """Coherent state |alpha> in a basis large enough for the policy's tail target."""
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ValidationError(f"alpha must be finite, got {alpha}")
    dim = resolve_dimension(policy, abs(alpha))
    tail = poisson_tail(abs(alpha) ** 2, dim)
    values = coherent_amplitudes(alpha, dim)
    if tail > NORMALIZATION_TOLERANCE:
        if policy.mode is TruncationMode.FIXED:
            raise TruncationError(f"dim {dim} leaves tail mass {tail:.3e} for alpha={alpha}")
        logger.debug(f"Renormalizing coherent state with tail mass {tail:.3e}")
        values = values / np.linalg.norm(values)
    return FockVector(values, normalized=True)


def displacement_operator(beta: complex, dim: int) -> Operator:
    """
    Truncated matrix of D(beta) = exp(beta b^dag - beta^* b).

    For m >= n the element is sqrt(n!/m!) beta^(m-n) e^{-|beta|^2/2} L_n^(m-n)(|beta|^2);
    the upper triangle uses (-beta^*) in place of beta.
    """
    validate_non_negative_integer(dim, "dim")
    if dim < 2:
        raise ValidationError(f"dim must be >= 2, got {dim}")
    beta = complex(beta)
    if beta == 0:
        return np.eye(dim, dtype=complex)

    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    low = np.minimum(m, n)
    high = np.maximum(m, n)
    k = high - low
    x = abs(beta) ** 2
    unit = beta / abs(beta)

    log_mag = 0.5 * (gammaln(low + 1) - gammaln(high + 1)) + k * math.log(abs(beta)) - 0.5 * x
    phase = np.where(m >= n, unit ** k, (-np.conj(unit)) ** k)
    with np.errstate(over="ignore", invalid="ignore"):
        laguerre = eval_genlaguerre(low, k, x)
        elements = np.exp(log_mag) * laguerre * phase
    # entries below e^-700 underflow; their Laguerre factor may overflow
    elements = np.where(log_mag < -700.0, 0.0, elements)
    if not np.all(np.isfinite(elements)):
        raise TruncationError(f"displacement matrix overflowed at dim {dim}, beta {beta}")
    return elements


def displaced_fock(beta: float, n: int, policy: TruncationPolicy) -> FockVector:
    """|n~> = D(beta)|n>, grown until the truncated column holds all but the tail target."""
    validate_non_negative_integer(n, "n")
    beta = validate_finite(beta, "beta")
    radius = abs(beta) + math.sqrt(n) + 1.0
    dim = resolve_dimension(policy, radius, floor=max(n + 2, 2))
    target = NORMALIZATION_TOLERANCE if policy.mode is TruncationMode.FIXED else policy.target_tail_mass
    while True:
        column = displacement_operator(beta, dim)[:, n]
        missing = 1.0 - float(np.real(np.vdot(column, column)))
        if missing <= target:
            break
        if policy.mode is TruncationMode.FIXED or dim >= policy.max_dim:
            raise TruncationError(f"dim {dim} leaves tail mass {missing:.3e} for |{n}~>, beta={beta}")
        dim = min(policy.max_dim, dim + max(8, dim // 4))
    if missing > NORMALIZATION_TOLERANCE:
        column = column / np.linalg.norm(column)
    return FockVector(column, normalized=True)


def free_phase_factors(t: float, dim: int) -> np.ndarray:
    """Diagonal of U_m(t): e^{-i(n+1/2)t}."""
    t = validate_finite(t, "t")
    return np.exp(-1j * (np.arange(dim) + 0.5) * t)


def free_phases(t: float, dim: int) -> Operator:
    """U_m(t) = sum_n |n> e^{-i(n+1/2)t} <n|."""
    return np.diag(free_phase_factors(t, dim))


class DisplacedFrame:
    """
    Eigenbasis of the photon-present mirror Hamiltonian.

    H_gamma |n~> = (n + 1/2 - beta^2)|n~> with |n~> = D(beta)|n>. Row vectors are
    used throughout so that batches of states can be moved in one matrix product.
    """

    def __init__(self, beta: float, dim: int):
        self.beta = float(beta)
        self.dim = dim
        self.displacement = displacement_operator(self.beta, dim)
        self.free_levels = np.arange(dim) + 0.5
        self.levels = self.free_levels - self.beta ** 2

    def to_frame(self, rows: np.ndarray) -> np.ndarray:
        """Rows v -> rows D^dag v."""
        return rows @ np.conj(self.displacement)

    def from_frame(self, rows: np.ndarray) -> np.ndarray:
        """Rows y -> rows D y."""
        return rows @ self.displacement.T

    def evolution(self, t: float) -> Operator:
        return (self.displacement * np.exp(-1j * self.levels * t)[None, :]) @ self.displacement.conj().T


def photon_present_evolution(
    t: float,
    beta: float,
    policy: TruncationPolicy,
    dim: Optional[int] = None,
) -> Operator:
    """U_gamma(t) = D(beta) diag(e^{-i(n+1/2-beta^2)t}) D(beta)^dag."""
    t = validate_finite(t, "t")
    if t < 0:
        raise ValidationError(f"t must be non-negative, got {t}")
    if dim is None:
        dim = resolve_dimension(policy, 2.0 * abs(beta))
    return DisplacedFrame(beta, dim).evolution(t)


def as_fock_vector(state: Union[FockVector, np.ndarray]) -> FockVector:
    if isinstance(state, FockVector):
        return state
    return FockVector(np.asarray(state, dtype=complex))
