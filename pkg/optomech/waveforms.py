"""
Single-photon waveforms F(x) for the ingoing wave packet.

Positions are measured in units of c/omega_m, so x and time share one axis.
Every waveform vanishes for x > 0 (the photon starts on the ingoing side) and
has unit L2 norm.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Union

import numpy as np

from .models import ValidationError, validate_finite, validate_non_negative_integer, validate_positive_number


logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SAMPLED_NORM_TOLERANCE = 1e-8


def _degenerate(rate: complex) -> bool:
    return abs(rate) < 1e-9


def _linear_mass(grid: np.ndarray, values: np.ndarray) -> float:
    """Exact integral of |v|^2 for v linear between the samples."""
    a, b = values[:-1], values[1:]
    segments = np.abs(a) ** 2 + np.abs(b) ** 2 + np.real(np.conj(a) * b)
    return float(np.sum(np.diff(grid) * segments) / 3.0)


def _exp_integral(rate: complex, t: float) -> complex:
    """Integral of e^{rate s} over s in [0, t], with the rate -> 0 limit."""
    if _degenerate(rate):
        return complex(t)
    return (np.exp(rate * t) - 1.0) / rate


class PhotonWaveform(ABC):
    """
    Abstract ingoing photon waveform.

    Subclasses provide the amplitude on x <= 0 and the probability mass that
    is still on its way to the cavity at time t.
    """

    @abstractmethod
    def _profile(self, x: np.ndarray) -> np.ndarray:
        """Amplitude on x <= 0 (callers mask x > 0)."""
        pass

    @abstractmethod
    def ingoing_mass(self, t: float) -> float:
        """Probability that the photon has not reached the cavity by time t."""
        pass

    def amplitude(self, x: ArrayLike) -> np.ndarray:
        """F(x), zero for x > 0."""
        x = np.asarray(x, dtype=float)
        values = np.zeros(x.shape, dtype=complex)
        inside = x <= 0
        if np.any(inside):
            values[inside] = self._profile(x[inside])
        return values

    def arrival(self, t: ArrayLike) -> np.ndarray:
        """F(-t): amplitude reaching the front mirror at time t."""
        return self.amplitude(-np.asarray(t, dtype=float))

    def norm_squared(self) -> float:
        return self.ingoing_mass(0.0)

    def filtered_response(self, t: float, gamma: float) -> Optional[complex]:
        """
        Closed form of the cavity-filtered arrival integral
        int_0^t e^{-gamma (t-s)/2} F(-s) ds, or None when no closed form exists.
        """
        return None

    def describe(self) -> str:
        return type(self).__name__


class ExponentialDecay(PhotonWaveform):
    """F(x) = sqrt(2 Gamma) e^{Gamma x} for x <= 0."""

    def __init__(self, big_gamma: float):
        self.big_gamma = validate_positive_number(big_gamma, "big_gamma", allow_zero=False)

    def _profile(self, x: np.ndarray) -> np.ndarray:
        return math.sqrt(2.0 * self.big_gamma) * np.exp(self.big_gamma * x)

    def ingoing_mass(self, t: float) -> float:
        t = validate_positive_number(t, "t")
        return math.exp(-2.0 * self.big_gamma * t)

    def filtered_response(self, t: float, gamma: float) -> Optional[complex]:
        rate = gamma / 2.0 - self.big_gamma
        return math.sqrt(2.0 * self.big_gamma) * math.exp(-gamma * t / 2.0) * _exp_integral(rate, t)

    def describe(self) -> str:
        return f"ExponentialDecay(big_gamma={self.big_gamma:g})"


class FockPrep(PhotonWaveform):
    """
    F(x) = sqrt(gamma) e^{(gamma/2 - i beta^2 + i n) x} for x <= 0.

    Rising exponential whose carrier is offset by (n - beta^2) from the cavity
    resonance, so that it drives the displaced Fock state |n~>.
    """

    def __init__(self, n: int, beta: float, gamma: float):
        self.n = validate_non_negative_integer(n, "n")
        self.beta = validate_positive_number(beta, "beta")
        self.gamma = validate_positive_number(gamma, "gamma", allow_zero=False)

    @property
    def carrier_offset(self) -> float:
        return self.n - self.beta ** 2

    def _profile(self, x: np.ndarray) -> np.ndarray:
        exponent = (self.gamma / 2.0 + 1j * self.carrier_offset) * x
        return math.sqrt(self.gamma) * np.exp(exponent)

    def ingoing_mass(self, t: float) -> float:
        t = validate_positive_number(t, "t")
        return math.exp(-self.gamma * t)

    def filtered_response(self, t: float, gamma: float) -> Optional[complex]:
        rate = gamma / 2.0 - self.gamma / 2.0 - 1j * self.carrier_offset
        return math.sqrt(self.gamma) * math.exp(-gamma * t / 2.0) * _exp_integral(rate, t)

    def describe(self) -> str:
        return f"FockPrep(n={self.n}, beta={self.beta:g}, gamma={self.gamma:g})"


class ModulatedPrep(PhotonWaveform):
    """
    F(x) = sqrt(gamma) e^{(gamma/2 - i beta^2) x} / Z * sum_n c~_n e^{i n x} for x <= 0.

    `tilde` holds the c~_n, `z` the normalization with
    Z^2 = sum_jk c~_j c~_k^* / (1 + i (j - k) / gamma).
    """

    def __init__(self, tilde: np.ndarray, beta: float, gamma: float, z: float):
        tilde = np.asarray(tilde, dtype=complex).ravel()
        if tilde.size == 0 or not np.all(np.isfinite(tilde)):
            raise ValidationError("modulation coefficients must be finite and non-empty")
        self.tilde = tilde
        self.beta = validate_positive_number(beta, "beta")
        self.gamma = validate_positive_number(gamma, "gamma", allow_zero=False)
        self.z = validate_positive_number(z, "z", allow_zero=False)
        self._orders = np.arange(tilde.size)

    def _profile(self, x: np.ndarray) -> np.ndarray:
        carrier = np.exp((self.gamma / 2.0 - 1j * self.beta ** 2) * x)
        modulation = np.exp(1j * np.outer(x, self._orders)) @ self.tilde
        return math.sqrt(self.gamma) * carrier * modulation / self.z

    def ingoing_mass(self, t: float) -> float:
        t = validate_positive_number(t, "t")
        diff = self._orders[:, None] - self._orders[None, :]
        rates = self.gamma + 1j * diff
        terms = np.outer(self.tilde, np.conj(self.tilde)) * np.exp(-rates * t) * self.gamma / rates
        return float(np.real(np.sum(terms))) / self.z ** 2

    def filtered_response(self, t: float, gamma: float) -> Optional[complex]:
        total = 0j
        for order, coeff in zip(self._orders, self.tilde):
            rate = gamma / 2.0 - self.gamma / 2.0 + 1j * (self.beta ** 2 - order)
            total += coeff * _exp_integral(rate, t)
        return math.sqrt(self.gamma) * math.exp(-gamma * t / 2.0) * total / self.z

    def describe(self) -> str:
        return f"ModulatedPrep(terms={self.tilde.size}, beta={self.beta:g}, gamma={self.gamma:g})"


class Sampled(PhotonWaveform):
    """Tabulated waveform, linearly interpolated, zero outside the grid and for x > 0."""

    def __init__(self, x: np.ndarray, values: np.ndarray):
        x = np.asarray(x, dtype=float).ravel()
        values = np.asarray(values, dtype=complex).ravel()
        if x.size < 3 or x.size != values.size:
            raise ValidationError("sampled waveform needs matching x and value arrays of length >= 3")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(values))):
            raise ValidationError("sampled waveform must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("sampled waveform grid must be strictly increasing")
        if np.any(values[x > 0] != 0):
            raise ValidationError("sampled waveform must vanish for x > 0")
        self.x = x
        self.values = values
        norm = self._mass_between(x[0], min(x[-1], 0.0))
        if abs(norm - 1.0) > SAMPLED_NORM_TOLERANCE:
            raise ValidationError(f"sampled waveform has norm^2 {norm:.12g}, expected 1")

    def _profile(self, x: np.ndarray) -> np.ndarray:
        real = np.interp(x, self.x, self.values.real, left=0.0, right=0.0)
        imag = np.interp(x, self.x, self.values.imag, left=0.0, right=0.0)
        return real + 1j * imag

    def _mass_between(self, low: float, high: float) -> float:
        if high <= low:
            return 0.0
        inside = (self.x > low) & (self.x < high)
        grid = np.concatenate(([low], self.x[inside], [high]))
        return _linear_mass(grid, self._profile(grid))

    def ingoing_mass(self, t: float) -> float:
        t = validate_positive_number(t, "t")
        return self._mass_between(self.x[0], min(-t, 0.0, self.x[-1]))

    @classmethod
    def from_waveform(cls, waveform: PhotonWaveform, x_min: float, step: float) -> 'Sampled':
        """Tabulate another waveform on [x_min, 0]; the tail beyond x_min is renormalized away."""
        validate_finite(x_min, "x_min")
        count = int(math.ceil(-x_min / step)) + 1
        grid = np.linspace(x_min, 0.0, count)
        values = waveform.amplitude(grid)
        norm = _linear_mass(grid, values)
        logger.debug(f"Tabulated {waveform.describe()} on {count} points, norm^2 {norm:.12g}")
        return cls(grid, values / math.sqrt(norm))

    def describe(self) -> str:
        return f"Sampled(points={self.x.size})"
