"""
Limiting ion profiles driven by a sampled UEP trajectory.

    ∂t ū_i + ū_i = ∇φ̄
    ∂t ρ̄_i¹ + div ū_i = Δρ̄_i¹

Both are linear with constant coefficients, so each is advanced mode by mode with its
exact integrating factor. The forcing is only known at the samples; between samples it is
taken linear in time and integrated exactly against the exponential, which is the
trapezoidal rule with exponential weights: second order in Δt, and exact for forcing that
is constant in time.
"""

from __future__ import annotations

import numpy as np

from plasma.core.types import Trajectory
from plasma.exceptions import InsufficientDataError
from spectral.core.grid import TorusGrid
from spectral.core.norms import sobolev_norm
from spectral.core.operators import check_mean_free, divergence

from .types import ProfileSeries


def exponential_trapezoid_weights(
    rate: np.ndarray | float, dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Weights of y_{k+1} = decay·y_k + a·f_k + b·f_{k+1} for y′ = −rate·y + f.

    a and b integrate e^{−rate(Δt−τ)} against the linear interpolant of f. At rate 0
    they reduce to the plain trapezoidal weights Δt/2.
    """
    rate = np.asarray(rate, dtype=float)
    x = rate * dt
    decay = np.exp(-x)
    small = x < 1e-8
    safe = np.where(small, 1.0, x)
    # ∫₀^Δt e^{−rate·σ} dσ and ∫₀^Δt σ e^{−rate·σ} dσ / Δt, in units of Δt
    whole = np.where(small, 1.0 - x / 2, -np.expm1(-safe) / safe)
    moment = np.where(small, 0.5 - x / 3, (-np.expm1(-safe) - safe * decay) / safe**2)
    b = dt * (whole - moment)
    a = dt * moment
    return decay, a, b


def _check_series(series: np.ndarray, dt: float, name: str) -> np.ndarray:
    series = np.asarray(series, dtype=float)
    if series.shape[0] == 0:
        raise InsufficientDataError(f"{name} series is empty", 0, 1)
    if not dt > 0:
        raise ValueError(f"Sample spacing must be positive; got {dt}")
    return series


def solve_ubar_i(
    grid: TorusGrid, E_bar_series: np.ndarray, u_bar_i0: np.ndarray, dt: float
) -> np.ndarray:
    """
    Limiting ion velocity from ∂t ū_i + ū_i = ∇φ̄.

    Args:
        grid: grid of the fields
        E_bar_series: ∇φ̄ at the uniformly spaced samples, shape (T,) + grid.vector_shape
        u_bar_i0: ū_i at the first sample
        dt: sample spacing Δt

    Returns:
        ū_i at every sample, same shape as E_bar_series

    Raises:
        InsufficientDataError: if the series is empty
    """
    E_bar_series = _check_series(E_bar_series, dt, "E_bar")
    u = grid.check_vector(u_bar_i0, "u_bar_i0")
    decay, a, b = exponential_trapezoid_weights(1.0, dt)

    result = np.empty_like(E_bar_series)
    result[0] = u
    for k in range(1, len(E_bar_series)):
        u = decay * u + a * E_bar_series[k - 1] + b * E_bar_series[k]
        result[k] = u
    return result


def solve_rho_i1(
    grid: TorusGrid, u_bar_i_series: np.ndarray, rho_i1_0: np.ndarray, dt: float
) -> np.ndarray:
    """
    First-order ion density profile from ∂t ρ̄_i¹ + div ū_i = Δρ̄_i¹.

    Each Fourier mode k ≠ 0 decays with e^{−|k|²Δt}; the forcing −div ū_i enters with
    exponential-trapezoidal weights. The mean mode is held at zero.

    Args:
        grid: grid of the fields
        u_bar_i_series: ū_i at the samples, shape (T,) + grid.vector_shape
        rho_i1_0: zero-mean initial profile
        dt: sample spacing Δt

    Returns:
        ρ̄_i¹ at every sample, shape (T,) + grid.shape

    Raises:
        InsufficientDataError: if the series is empty
        CompatibilityError: if rho_i1_0 has a nonzero mean
    """
    u_bar_i_series = _check_series(u_bar_i_series, dt, "u_bar_i")
    rho = grid.check_scalar(rho_i1_0, "rho_i1_0")
    check_mean_free(grid, rho, scale=1.0)

    decay, a, b = exponential_trapezoid_weights(grid.k_squared, dt)
    nonzero = grid.k_squared > 0

    forcing_hat = np.stack([grid.forward(-divergence(grid, u)) for u in u_bar_i_series])
    rho_hat = grid.forward(rho) * nonzero
    result = np.empty((len(u_bar_i_series),) + grid.shape)
    result[0] = grid.inverse(rho_hat)
    for k in range(1, len(u_bar_i_series)):
        rho_hat = (decay * rho_hat + a * forcing_hat[k - 1] + b * forcing_hat[k]) * nonzero
        result[k] = grid.inverse(rho_hat)
    return result


def solve_profiles(
    uep_traj: Trajectory, u_bar_i0: np.ndarray, rho_i1_0: np.ndarray
) -> ProfileSeries:
    """
    Solve both profiles on the sample grid of a UEP trajectory.

    Raises:
        ValueError: if the trajectory is not uniformly sampled
    """
    grid = uep_traj.grid
    times = uep_traj.times
    dt = uep_traj.interval() if len(uep_traj) > 1 else 1.0
    E_bar = np.stack([sample.E for sample in uep_traj])
    u_bar = solve_ubar_i(grid, E_bar, u_bar_i0, dt)
    rho_bar = solve_rho_i1(grid, u_bar, rho_i1_0, dt)
    return ProfileSeries(grid, times, u_bar, rho_bar)


def divergence_decay(grid: TorusGrid, u_bar_i_series: np.ndarray, s: int) -> np.ndarray:
    """‖div ū_i(t)‖_{s−1} at every sample; decays exponentially for small UEP data."""
    return np.array([sobolev_norm(grid, divergence(grid, u), s - 1) for u in u_bar_i_series])
