"""
Tests for the truncated Fock-space layer.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from scipy.linalg import expm

from optomech.fock_core import (
    DisplacedFrame,
    FockVector,
    TruncationError,
    coherent_fock_overlap,
    coherent_state,
    displaced_fock,
    displacement_operator,
    free_phases,
    photon_present_evolution,
    resolve_dimension,
)
from optomech.models import TruncationPolicy, ValidationError


def _lowering(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def test_coherent_fock_overlap_values():
    assert coherent_fock_overlap(1.0, 0) == pytest.approx(0.606531, abs=1e-6)
    assert coherent_fock_overlap(1.0, 2) == pytest.approx(0.428882, abs=1e-6)
    assert coherent_fock_overlap(-1.0, 1) == pytest.approx(-0.606531, abs=1e-6)
    assert coherent_fock_overlap(0.0, 0) == 1.0
    assert coherent_fock_overlap(0.0, 3) == 0.0


def test_displacement_matches_matrix_exponential():
    beta = 0.7 - 0.3j
    dim = 80
    a = _lowering(dim)
    reference = expm(beta * a.conj().T - np.conj(beta) * a)
    closed = displacement_operator(beta, dim)
    assert np.allclose(closed[:12, :12], reference[:12, :12], atol=1e-10)


def test_displacement_columns_are_orthonormal():
    d = displacement_operator(1.5, 60)
    gram = d[:, :6].conj().T @ d[:, :6]
    assert np.allclose(gram, np.eye(6), atol=1e-10)


def test_displacement_rejects_tiny_dimension():
    with pytest.raises(ValidationError):
        displacement_operator(1.0, 1)


def test_photon_present_evolution_matches_hamiltonian():
    beta, t, dim = 0.5, 1.3, 80
    a = _lowering(dim)
    hamiltonian = np.diag(np.arange(dim) + 0.5) - beta * (a + a.conj().T)
    reference = expm(-1j * hamiltonian * t)
    frame = DisplacedFrame(beta, dim)
    assert np.allclose(frame.evolution(t)[:10, :10], reference[:10, :10], atol=1e-9)


def test_photon_present_evolution_rejects_negative_time():
    with pytest.raises(ValidationError):
        photon_present_evolution(-0.1, 1.0, TruncationPolicy())


def test_evolution_without_coupling_is_free():
    u = photon_present_evolution(0.8, 0.0, TruncationPolicy.fixed(12))
    assert np.allclose(u, free_phases(0.8, 12))


def test_frame_round_trip():
    frame = DisplacedFrame(1.0, 40)
    rows = np.zeros((1, 40), dtype=complex)
    rows[0, 0] = 1.0
    back = frame.from_frame(frame.to_frame(rows))
    assert np.allclose(back[0, :10], rows[0, :10], atol=1e-10)


def test_coherent_state_adaptive_is_normalized():
    state = coherent_state(2.0 + 1.0j, TruncationPolicy.adaptive(1e-12))
    assert state.normalized
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-10)
    assert abs(state.amplitudes[0]) == pytest.approx(np.exp(-2.5), rel=1e-9)


def test_coherent_state_fixed_truncation_too_small():
    with pytest.raises(TruncationError):
        coherent_state(3.0, TruncationPolicy.fixed(5))


def test_resolve_dimension_respects_max_dim():
    with pytest.raises(TruncationError):
        resolve_dimension(TruncationPolicy.adaptive(1e-12, max_dim=10), 5.0)
    assert resolve_dimension(TruncationPolicy.fixed(7), 5.0) == 7


def test_displaced_fock_matches_operator_column():
    state = displaced_fock(1.2, 2, TruncationPolicy())
    column = displacement_operator(1.2, state.dim)[:, 2]
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(state.amplitudes, column, atol=1e-10)


def test_fock_vector_operations():
    zero = FockVector.basis(0, 3)
    one = FockVector.basis(1, 2)
    assert zero.inner(one) == 0
    total = zero + one
    assert total.dim == 3
    assert total.norm_squared() == pytest.approx(2.0)
    assert total.normalize().fidelity(zero) == pytest.approx(1.0 / np.sqrt(2.0))
    assert (total - one).inner(zero) == pytest.approx(1.0)
    with pytest.raises(TruncationError):
        total.padded(1)
    with pytest.raises(ValidationError):
        FockVector.basis(3, 3)
    with pytest.raises(ValidationError):
        FockVector(np.array([1.0, 1.0]), normalized=True)


def test_displacement_inverse_and_composition():
    dim = 64
    product = displacement_operator(1.5, dim) @ displacement_operator(-1.5, dim)
    assert np.allclose(product[:10, :10], np.eye(10), atol=1e-8)

    a, b = 0.8 + 0.4j, -0.3 + 1.1j
    composed = displacement_operator(a, dim) @ displacement_operator(b, dim)
    expected = np.exp(1j * np.imag(a * np.conj(b))) * displacement_operator(a + b, dim)
    assert np.allclose(composed[:10, :10], expected[:10, :10], atol=1e-7)


def test_displaced_vacuum_is_coherent_state():
    column = displacement_operator(1.0, 40)[:, 0]
    coherent = coherent_state(1.0, TruncationPolicy.fixed(40))
    assert np.allclose(column[:15], coherent.amplitudes[:15], atol=1e-10)


def test_overlap_law():
    for beta in (0.25, 0.5, 1.0, 2.0):
        for n in range(9):
            expected = (-beta) ** n * np.exp(-beta ** 2 / 2.0) / np.sqrt(float(np.prod(np.arange(1, n + 1))))
            assert coherent_fock_overlap(-beta, n) == pytest.approx(expected, abs=1e-9)


def test_free_phases_period():
    assert np.allclose(free_phases(0.0, 6), np.eye(6))
    assert np.allclose(free_phases(2.0 * np.pi, 6), -np.eye(6))


def test_displaced_fock_states_are_eigenstates():
    beta, t = 1.0, 2.3
    evolution = photon_present_evolution(t, beta, TruncationPolicy.fixed(60))
    for n in range(5):
        state = displaced_fock(beta, n, TruncationPolicy.fixed(60)).amplitudes
        phase = np.exp(-1j * (n + 0.5 - beta ** 2) * t)
        assert np.allclose(evolution @ state, phase * state, atol=1e-8)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
