"""
Tests for ingoing photon waveforms.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from scipy.integrate import quad as scalar_quad

from optomech.models import QuadratureConfig, TargetState, ValidationError
from optomech.quadrature import integrate
from optomech.state_prep import arbitrary_prep_waveform
from optomech.waveforms import ExponentialDecay, FockPrep, ModulatedPrep, Sampled


def _numeric_response(waveform, t, gamma):
    return complex(integrate(
        lambda u: np.exp(-gamma * (t - u) / 2.0) * waveform.arrival(u), 0.0, t, QuadratureConfig(base_step=0.01)
    ))


def _numeric_mass(waveform, t, lower=-60.0):
    real = scalar_quad(lambda x: abs(complex(waveform.amplitude(x))) ** 2, lower, -t, limit=400)[0]
    return real


def test_exponential_decay_shape():
    waveform = ExponentialDecay(0.5)
    assert waveform.amplitude(0.3) == 0
    assert complex(waveform.amplitude(0.0)) == pytest.approx(1.0)
    assert complex(waveform.arrival(2.0)) == pytest.approx(np.exp(-1.0))
    assert waveform.norm_squared() == pytest.approx(1.0)
    assert waveform.ingoing_mass(1.5) == pytest.approx(_numeric_mass(waveform, 1.5), abs=1e-9)


def test_exponential_decay_rejects_zero_width():
    with pytest.raises(ValidationError):
        ExponentialDecay(0.0)


@pytest.mark.parametrize("waveform, gamma", [
    (ExponentialDecay(1.0), 1.0),
    (ExponentialDecay(0.5), 1.0),  # gamma = 2 Gamma, degenerate exponent
    (FockPrep(2, 1.0, 0.8), 0.8),
    (FockPrep(0, 0.7, 0.5), 1.0),
])
def test_filtered_response_closed_form(waveform, gamma):
    for t in (0.4, 2.0, 2.0 * np.pi):
        assert waveform.filtered_response(t, gamma) == pytest.approx(_numeric_response(waveform, t, gamma), abs=1e-9)


def test_fock_prep_mass_and_carrier():
    waveform = FockPrep(3, 1.0, 0.6)
    assert waveform.carrier_offset == pytest.approx(2.0)
    assert waveform.ingoing_mass(0.0) == pytest.approx(1.0)
    assert waveform.ingoing_mass(1.0) == pytest.approx(_numeric_mass(waveform, 1.0, lower=-120.0), abs=1e-8)


def test_modulated_prep_is_normalized():
    target = TargetState.from_unnormalized([1.0, 0.5j, 0.25], beta=1.2)
    waveform, z = arbitrary_prep_waveform(target, gamma=0.5)
    assert isinstance(waveform, ModulatedPrep)
    assert z > 0
    assert waveform.norm_squared() == pytest.approx(1.0, abs=1e-10)
    assert waveform.ingoing_mass(0.7) == pytest.approx(_numeric_mass(waveform, 0.7, lower=-120.0), abs=1e-7)
    for t in (0.5, 2.0 * np.pi):
        assert waveform.filtered_response(t, 0.5) == pytest.approx(_numeric_response(waveform, t, 0.5), abs=1e-9)


def test_sampled_from_waveform():
    source = ExponentialDecay(1.0)
    sampled = Sampled.from_waveform(source, x_min=-25.0, step=0.005)
    assert sampled.norm_squared() == pytest.approx(1.0, abs=1e-8)
    assert complex(sampled.amplitude(-0.5)) == pytest.approx(complex(source.amplitude(-0.5)), abs=1e-4)
    assert sampled.amplitude(0.1) == 0
    assert sampled.ingoing_mass(1.0) == pytest.approx(source.ingoing_mass(1.0), abs=1e-4)
    assert sampled.filtered_response(1.0, 1.0) is None


def test_sampled_validation():
    x = np.linspace(-10.0, 0.0, 101)
    with pytest.raises(ValidationError):
        Sampled(x, np.ones_like(x))
    with pytest.raises(ValidationError):
        Sampled(x[::-1], np.ones_like(x))
    grid = np.linspace(-10.0, 1.0, 111)
    with pytest.raises(ValidationError):
        Sampled(grid, np.ones_like(grid))


def test_sampled_mass_exact_on_irregular_grid():
    x = np.array([-3.0, -2.9, -1.2, -1.1, -0.3, 0.0])
    shape = np.array([0.0, 1.0, 0.2, 0.9, 0.7, 0.0])

    def density(s):
        return np.interp(s, x, shape) ** 2

    raw = sum(scalar_quad(density, lo, hi, epsabs=1e-14, epsrel=1e-13)[0] for lo, hi in zip(x[:-1], x[1:]))
    sampled = Sampled(x, shape / np.sqrt(raw))
    assert sampled.norm_squared() == pytest.approx(1.0, abs=1e-11)
    expected = scalar_quad(density, -3.0, -2.0, points=[-2.9], epsabs=1e-14, epsrel=1e-13)[0] / raw
    assert sampled.ingoing_mass(2.0) == pytest.approx(expected, abs=1e-11)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
