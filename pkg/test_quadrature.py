"""
Tests for Simpson quadrature and the damped cumulative integrals.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from optomech.models import QuadratureConfig, ValidationError
from optomech.quadrature import QuadratureError, damped_cumulative, integrate


def test_integrate_vector_valued():
    result = integrate(lambda u: np.stack([np.sin(u), np.cos(u)], axis=1), 0.0, np.pi, QuadratureConfig())
    assert result.shape == (2,)
    assert result[0] == pytest.approx(2.0, abs=1e-10)
    assert result[1] == pytest.approx(0.0, abs=1e-10)


def test_integrate_complex_oscillation():
    result = integrate(lambda u: np.exp(3j * u), 0.0, 1.0, QuadratureConfig(base_step=0.01))
    assert complex(result) == pytest.approx((np.exp(3j) - 1.0) / 3j, abs=1e-10)


def test_integrate_empty_interval():
    result = integrate(lambda u: np.ones((u.size, 3)), 1.0, 1.0, QuadratureConfig())
    assert np.array_equal(result, np.zeros(3))


def test_integrate_reversed_limits():
    with pytest.raises(ValidationError):
        integrate(np.sin, 1.0, 0.0, QuadratureConfig())


def test_integrate_reports_non_convergence():
    with pytest.raises(QuadratureError):
        integrate(np.sin, 0.0, 1.0, QuadratureConfig(refine_factor=0))


@pytest.mark.parametrize("rate", [0.5 + 3.0j, 5.0 + 0.0j])
def test_damped_cumulative_closed_form(rate):
    step, intervals = 0.01, 2000
    times = step * np.arange(intervals + 1)
    rates = np.array([rate])
    result = damped_cumulative(np.ones((intervals + 1, 1)), np.ones((intervals, 1)), rates, step)
    expected = (1.0 - np.exp(-rate * times)) / rate
    assert np.allclose(result[:, 0], expected, atol=1e-9)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
