"""
Unit tests for the linearized unipolar solution.
"""

import numpy as np
import pytest

from limits.core.data import well_prepared_data
from limits.core.linear import envelope_rate, linear_decay_series, linear_uep_state
from limits.core.stream import uep_decay_series
from limits.core.types import WellPreparedFamily
from plasma.core.timestep import integrate
from plasma.core.types import PlasmaParams, PressureLaw, StepPolicy, UepState
from spectral.core.operators import divergence, gradient, solve_poisson_zero_mean

LAW = PressureLaw(K=1.0, gamma=2.0)


@pytest.fixture
def random_uep_state(random_field_factory):
    """Smooth unipolar state with 0.1-sized perturbations in modes |k_j| <= 3."""

    def _create(grid, seed: int = 0) -> UepState:
        return UepState(
            grid,
            rho_e=1 + random_field_factory(grid, seed, 3, zero_mean=True, amplitude=0.1),
            u_e=random_field_factory(grid, seed + 1, 3, vector=True, amplitude=0.1),
        )

    return _create


def _sine_state(grid, amplitude=0.01):
    x1 = grid.coordinates()[0]
    return UepState(grid, 1 + amplitude * np.sin(x1), grid.zeros(vector=True))


def _linear_rhs(state, law):
    """(−div u, −c²∇n − ∇φ − u) with Δφ = −n."""
    grid = state.grid
    n = state.rho_e - 1
    phi = solve_poisson_zero_mean(grid, -n, scale=1.0)
    c2 = law.K * law.gamma
    return -divergence(grid, state.u_e), -c2 * gradient(grid, n) - gradient(grid, phi) - state.u_e


# Tests for linear_uep_state


def test_initial_time_returns_initial_state(grid_2d, random_uep_state):
    initial = random_uep_state(grid_2d, seed=3)

    state = linear_uep_state(initial, LAW, 0.0)

    np.testing.assert_allclose(state.rho_e, initial.rho_e, atol=1e-14)
    np.testing.assert_allclose(state.u_e, initial.u_e, atol=1e-14)


def test_equilibrium_stays_put(grid_1d):
    state = linear_uep_state(UepState.equilibrium(grid_1d), LAW, 3.0)

    assert state.max_abs_deviation() == 0.0


def test_single_mode_damped_oscillation(grid_1d):
    """
    n₀ = δ·sin x, u₀ = 0, K = 1, γ = 2: Δ = c² + 1 = 3.

    Expected: n(t) = δ e^{−t/2}(cos ωt + sin ωt/(2ω)) sin x with ω² = 11/4
    """
    (x,) = grid_1d.coordinates()
    omega = np.sqrt(11 / 4)
    t = 1.7

    state = linear_uep_state(_sine_state(grid_1d), LAW, t)

    expected = 0.01 * np.exp(-t / 2) * (np.cos(omega * t) + np.sin(omega * t) / (2 * omega))
    np.testing.assert_allclose(state.rho_e - 1, expected * np.sin(x), atol=1e-14)


def test_solves_linearized_system(grid_2d, random_uep_state):
    """Centered time differences of the solution match the linearized right-hand side."""
    initial = random_uep_state(grid_2d, seed=9)
    t, h = 0.8, 1e-5

    later = linear_uep_state(initial, LAW, t + h)
    earlier = linear_uep_state(initial, LAW, t - h)
    d_n, d_u = _linear_rhs(linear_uep_state(initial, LAW, t), LAW)

    np.testing.assert_allclose((later.rho_e - earlier.rho_e) / (2 * h), d_n, atol=1e-7)
    np.testing.assert_allclose((later.u_e - earlier.u_e) / (2 * h), d_u, atol=1e-7)


def test_transverse_velocity_decays_at_unit_rate(grid_2d):
    """u = (0, sin x₁) is divergence free and uncoupled from the density."""
    x1, _ = grid_2d.coordinates()
    u = grid_2d.zeros(vector=True)
    u[1] = 0.01 * np.sin(x1)

    state = linear_uep_state(UepState(grid_2d, grid_2d.ones(), u), LAW, 2.0)

    np.testing.assert_allclose(state.u_e, np.exp(-2.0) * u, atol=1e-15)
    np.testing.assert_allclose(state.rho_e, 1.0, atol=1e-15)


def test_matches_small_amplitude_run(grid_1d):
    """At δ₀ = 1e−4 the nonlinear unipolar run follows the linearization."""
    family = WellPreparedFamily.default(grid_1d, delta0=1e-4)
    _, uep0, _ = well_prepared_data(family, 1.0)
    traj = integrate(uep0, PlasmaParams(epsilon=1.0), StepPolicy(t_end=2.0, sample_interval=1.0))

    linear = linear_uep_state(uep0, LAW, 2.0)

    scale = 1e-4
    final = traj.final.state
    assert np.max(np.abs(final.rho_e - linear.rho_e)) < 1e-3 * scale
    assert np.max(np.abs(final.u_e - linear.u_e)) < 1e-3 * scale


def test_negative_time_is_rejected(grid_1d):
    with pytest.raises(ValueError):
        linear_uep_state(_sine_state(grid_1d), LAW, -1.0)


def test_non_constant_background_is_rejected(grid_1d):
    state = _sine_state(grid_1d)
    doped = UepState(grid_1d, state.rho_e, state.u_e, background=state.rho_e.copy())

    with pytest.raises(ValueError):
        linear_uep_state(doped, LAW, 1.0)


# Tests for envelope_rate


def test_envelope_rate_of_charged_mode(default_family):
    _, uep0, _ = well_prepared_data(default_family, 1.0)

    assert envelope_rate(uep0, LAW) == pytest.approx(0.5, abs=1e-12)


def test_envelope_rate_of_transverse_velocity(grid_2d):
    x1, _ = grid_2d.coordinates()
    u = grid_2d.zeros(vector=True)
    u[1] = np.cos(x1)

    assert envelope_rate(UepState(grid_2d, grid_2d.ones(), u), LAW) == 1.0


def test_envelope_rate_of_equilibrium(grid_1d):
    assert envelope_rate(UepState.equilibrium(grid_1d), LAW) == 0.0


# Tests for linear_decay_series


def test_linear_decay_series_starts_at_data(default_family):
    """At t = 0 the linear and nonlinear series share their value."""
    _, uep0, _ = well_prepared_data(default_family, 1.0)
    traj = integrate(uep0, PlasmaParams(epsilon=1.0), StepPolicy(t_end=0.0, sample_interval=1.0))

    series = linear_decay_series(uep0, LAW, np.array([0.0, 1.0, 2.0]), 2)

    assert series[0] == pytest.approx(uep_decay_series(traj, 2)[0], rel=1e-13)
    assert series[2] < series[0]
