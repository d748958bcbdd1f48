"""
Composite Simpson quadrature with step doubling and Richardson extrapolation.

Integrands are vectorized: fn(nodes) returns an array whose first axis runs over
the nodes, so a whole state vector (or a stack of them) is integrated at once.
"""

import logging
import math
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .models import NumericalError, QuadratureConfig, ValidationError, validate_finite


logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

# Simpson's global error is O(h^4): S + (S - S_coarse) / 15 removes the leading term.
RICHARDSON_DIVISOR = 15.0


class QuadratureError(NumericalError):
    """Raised when successive refinements still differ by more than the tolerance."""
    pass


def _initial_intervals(length: float, base_step: float) -> int:
    count = max(4, int(math.ceil(length / base_step)))
    return count + (-count % 4)


def integrate(fn: Integrand, a: float, b: float, config: QuadratureConfig) -> np.ndarray:
    """
    Integrate fn over [a, b].

    The node count starts at a multiple of four no coarser than base_step and is
    doubled (evaluating only the new midpoints) until the max-norm change between
    two Simpson sums is within config.tolerance, at most refine_factor times.

    Args:
        fn: Vectorized integrand, nodes of shape (N,) -> values of shape (N, ...)
        a: Lower limit
        b: Upper limit, b >= a
        config: Step, refinement and tolerance settings

    Returns:
        Richardson-extrapolated integral with the trailing shape of fn's values

    Raises:
        QuadratureError: If the tolerance is not met after refine_factor doublings
    """
    a = validate_finite(a, "a")
    b = validate_finite(b, "b")
    if b < a:
        raise ValidationError(f"upper limit {b} is below lower limit {a}")

    intervals = _initial_intervals(b - a, config.base_step)
    nodes = np.linspace(a, b, intervals + 1)
    values = np.asarray(fn(nodes))
    if b == a:
        return np.zeros(values.shape[1:], dtype=values.dtype)

    previous = simpson(values, dx=(b - a) / intervals, axis=0)
    change = math.inf
    for level in range(config.refine_factor):
        step = (b - a) / intervals
        midpoints = a + step * (np.arange(intervals) + 0.5)
        fresh = np.asarray(fn(midpoints))
        merged = np.empty((2 * intervals + 1,) + values.shape[1:], dtype=np.result_type(values, fresh))
        merged[0::2] = values
        merged[1::2] = fresh
        values = merged
        intervals *= 2

        current = simpson(values, dx=(b - a) / intervals, axis=0)
        change = float(np.max(np.abs(current - previous))) if np.size(current) else 0.0
        if change <= config.tolerance:
            logger.debug(f"Quadrature on [{a:.4g}, {b:.4g}] converged with {intervals} intervals "
                         f"(change {change:.2e})")
            return current + (current - previous) / RICHARDSON_DIVISOR
        previous = current

    raise QuadratureError(
        f"quadrature on [{a:.6g}, {b:.6g}] did not converge after {config.refine_factor} "
        f"refinements: last change {change:.3e} > tolerance {config.tolerance:.1e}"
    )


def damped_cumulative(
    node_values: np.ndarray,
    mid_values: np.ndarray,
    rates: np.ndarray,
    step: float,
    initial: np.ndarray = None,
) -> np.ndarray:
    """
    Running integrals Y(s_k) = int_0^{s_k} e^{-rates (s_k - u)} y(u) du on a uniform grid.

    Uses one Simpson panel per grid interval (endpoints plus midpoint), so the
    result is fourth order in `step`. The recursion is evaluated in blocks whose
    exponential growth stays bounded, which keeps long damped runs in range.

    Args:
        node_values: y at the grid points, shape (K+1, dim)
        mid_values: y at interval midpoints, shape (K, dim)
        rates: Complex damping rates with non-negative real part, shape (dim,)
        step: Grid spacing
        initial: Y(0), zero if omitted

    Returns:
        Array of shape (K+1, dim) holding Y at every grid point
    """
    intervals = mid_values.shape[0]
    dim = node_values.shape[1]
    result = np.empty((intervals + 1, dim), dtype=complex)
    result[0] = 0.0 if initial is None else initial

    max_real = float(np.max(np.real(rates))) if rates.size else 0.0
    block = intervals if max_real * step * intervals <= 30.0 else max(1, int(30.0 / (max_real * step)))

    start = 0
    while start < intervals:
        stop = min(intervals, start + block)
        local = np.arange(stop - start + 1)[:, None] * step
        grow_nodes = np.exp(rates[None, :] * local)
        grow_mids = np.exp(rates[None, :] * (local[:-1] + step / 2.0))
        panels = (step / 6.0) * (
            grow_nodes[:-1] * node_values[start:stop]
            + 4.0 * grow_mids * mid_values[start:stop]
            + grow_nodes[1:] * node_values[start + 1:stop + 1]
        )
        running = np.cumsum(panels, axis=0)
        decay = np.exp(-rates[None, :] * local[1:])
        result[start + 1:stop + 1] = decay * (result[start][None, :] + running)
        start = stop
    return result
