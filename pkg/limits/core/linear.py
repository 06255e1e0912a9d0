"""
Linearized unipolar dynamics about the uniform equilibrium (1, 0) with b ≡ 1.

Per Fourier mode the perturbation (n, u) = (ρ̄_e − 1, ū_e) obeys

    ∂t n̂ = −i k·û
    ∂t û = −i k (c² + 1/|k|²) n̂ − û,      c² = h_e′(1) = Kγ

The longitudinal pair (n̂, ℓ̂ = û·k/|k|) is a damped oscillator with λ² + λ + Δ = 0,
Δ = |k|²c² + 1, while the transverse velocity and the mean velocity decay as e^{−t}.
Δ > 1/4 on the 2π torus, so every charged mode oscillates under the envelope e^{−t/2}
and a log-linear fit of the decay series carries that oscillation in its residual.

Odd derivatives drop the Nyquist mode exactly as the right-hand side does.
"""

from __future__ import annotations

import numpy as np

from plasma.core.equations import pressure_prime
from plasma.core.types import PressureLaw, UepState
from spectral.core.grid import TorusGrid

from .stream import uep_deviation

# relative amplitude below which a mode counts as not excited
EXCITATION_RTOL = 1e-10


def _oscillator(grid: TorusGrid, law: PressureLaw) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k, |k|, coupling) on the half spectrum with coupling = |k|(c² + 1/|k|²)."""
    k = grid.real_gradient_symbol.imag
    kappa = np.sqrt(np.sum(k * k, axis=0))
    c2 = float(pressure_prime(law, 1.0))
    coupling = kappa * (c2 - grid.real_inverse_laplacian_symbol)
    return k, kappa, coupling


def _require_uniform_background(state: UepState) -> None:
    if state.background is not None:
        raise ValueError("The linearized unipolar solution assumes the background b ≡ 1")


def _modes(
    initial: UepState, k: np.ndarray, kappa: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(k/|k|, n̂, ℓ̂, transverse û); the mean velocity counts as transverse."""
    grid = initial.grid
    k_unit = np.divide(k, kappa, out=np.zeros_like(k), where=kappa > 0)
    n_hat = grid.rforward(initial.rho_e - 1)
    u_hat = grid.rforward(initial.u_e)
    ell = np.sum(k_unit * u_hat, axis=0)
    return k_unit, n_hat, ell, u_hat - k_unit * ell


def linear_uep_state(initial: UepState, law: PressureLaw, t: float) -> UepState:
    """
    Exact solution of the linearized unipolar system at time t.

    Each mode is propagated with exp(At) = e^{−t/2}[cosh(μt)·I + sinh(μt)/μ·(A + I/2)],
    μ² = 1/4 − Δ, for oscillating and overdamped modes alike.

    Raises:
        ValueError: if t < 0 or the initial state has a non-constant background
    """
    _require_uniform_background(initial)
    if not t >= 0:
        raise ValueError(f"t must be nonnegative; got {t}")
    grid = initial.grid
    k, kappa, coupling = _oscillator(grid, law)
    k_unit, n_hat, ell, transverse = _modes(initial, k, kappa)

    mu = np.sqrt(0.25 - kappa * coupling + 0j)
    cosh = np.cosh(mu * t)
    sinh_over_mu = np.where(mu == 0, t, np.sinh(mu * t) / np.where(mu == 0, 1, mu))
    envelope = np.exp(-0.5 * t)
    n_t = envelope * (cosh * n_hat + sinh_over_mu * (0.5 * n_hat - 1j * kappa * ell))
    ell_t = envelope * (cosh * ell + sinh_over_mu * (-1j * coupling * n_hat - 0.5 * ell))
    u_t = k_unit * ell_t + np.exp(-t) * transverse
    return UepState(grid, 1 + grid.rinverse(n_t), grid.rinverse(u_t))


def envelope_rate(initial: UepState, law: PressureLaw) -> float:
    """
    Slowest exponential decay rate among the modes the initial state excites.

    Charged modes decay at 1/2 − Re √(1/4 − Δ); transverse and mean velocities at 1.
    Returns 0 for the equilibrium, which does not decay.
    """
    _require_uniform_background(initial)
    k, kappa, coupling = _oscillator(initial.grid, law)
    _, n_hat, ell, transverse = _modes(initial, k, kappa)
    longitudinal = np.abs(n_hat) + np.abs(ell)
    crosswise = np.sqrt(np.sum(np.abs(transverse) ** 2, axis=0))
    peak = max(float(np.max(longitudinal)), float(np.max(crosswise)))
    if peak == 0:
        return 0.0

    rates = []
    charged = (longitudinal > EXCITATION_RTOL * peak) & (kappa > 0)
    if np.any(charged):
        roots = np.sqrt(0.25 - kappa[charged] * coupling[charged] + 0j)
        rates.append(float(np.min(0.5 - roots.real)))
    if np.any(crosswise > EXCITATION_RTOL * peak):
        rates.append(1.0)
    return min(rates, default=0.0)


def linear_decay_series(
    initial: UepState, law: PressureLaw, times: np.ndarray, s: int
) -> np.ndarray:
    """uep_deviation of the linearized solution at every time."""
    return np.array([uep_deviation(linear_uep_state(initial, law, t), s) for t in times])
