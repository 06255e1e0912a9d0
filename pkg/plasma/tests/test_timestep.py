"""
Unit tests for the CFL rule, the RK4 step and trajectory integration.
"""

import time

import numpy as np
import pytest

from plasma.core.timestep import cfl_dt, integrate, step_rk4
from plasma.core.types import BepState, PlasmaParams, PressureLaw, StepPolicy, System, UepState
from plasma.exceptions import IntegrationError, UnstableStateError
from spectral.core.grid import make_grid
from spectral.core.norms import sobolev_norm

# Tests for cfl_dt


def test_cfl_dt_equilibrium_gamma_two():
    """
    Equilibrium, γ_e = 2, K = 1, n = 128, cfl = 0.4.

    Expected: dt = 0.4·(2π/128)/√2
    """
    grid = make_grid(1, 128)
    params = PlasmaParams(epsilon=0.5)

    dt = cfl_dt(BepState.equilibrium(grid), params, StepPolicy(t_end=1.0, sample_interval=0.1))

    assert dt == pytest.approx(0.4 * (2 * np.pi / 128) / np.sqrt(2), rel=1e-14)


def test_cfl_dt_isothermal_speed_is_one(grid_1d, isothermal_params):
    """All-zero velocities and K = 1 isothermal: λ_max = 1."""
    policy = StepPolicy(t_end=1.0, sample_interval=0.1, cfl_number=0.5)

    dt = cfl_dt(UepState.equilibrium(grid_1d), isothermal_params, policy)

    assert dt == pytest.approx(0.5 * grid_1d.spacing)


def test_cfl_dt_ions_do_not_limit_small_epsilon(grid_1d):
    """For ε → 0 an ion-only perturbation leaves dt at the electron sound speed."""
    params = PlasmaParams(epsilon=1e-3)
    (x,) = grid_1d.coordinates()
    state = BepState.equilibrium(grid_1d)
    state = BepState(grid_1d, state.rho_i, 0.5 * np.cos(x)[None] * 1e-6, state.rho_e, state.u_e)

    dt = cfl_dt(state, params)

    assert dt == pytest.approx(0.4 * grid_1d.spacing / np.sqrt(2), rel=1e-5)


def test_cfl_dt_capped_at_dt_max():
    """Coarse grids are limited by dt_max rather than the CFL number."""
    grid = make_grid(1, 8)
    policy = StepPolicy(t_end=1.0, sample_interval=0.1, cfl_number=1.0, dt_max=0.1)

    assert cfl_dt(BepState.equilibrium(grid), PlasmaParams(epsilon=0.5), policy) == 0.1


def test_cfl_dt_nonfinite_velocity(grid_1d, params):
    """
    A NaN velocity makes the speed nonfinite.

    Expected: UnstableStateError
    """
    u_e = grid_1d.zeros(vector=True)
    u_e[0, 4] = np.nan
    state = UepState(grid_1d, grid_1d.ones(), u_e)

    with pytest.raises(UnstableStateError):
        cfl_dt(state, params)


# Tests for step_rk4


def test_equilibrium_bit_stable_over_many_steps():
    """1000 steps at d=1, n=64, ε=0.5 leave the equilibrium untouched."""
    grid = make_grid(1, 64)
    params = PlasmaParams(epsilon=0.5)
    state = BepState.equilibrium(grid)
    dt = cfl_dt(state, params)

    for _ in range(1000):
        state = step_rk4(state, params, dt)

    assert state.max_abs_deviation() < 1e-12


@pytest.mark.slow
def test_equilibrium_thousand_steps_under_one_second():
    """
    Wall clock of 1000 RK4 steps at d=1, n=64, ε=0.5, dt=0.01 from equilibrium.

    Expected: below 1 s
    """
    grid = make_grid(1, 64)
    params = PlasmaParams(epsilon=0.5)
    state = BepState.equilibrium(grid)
    step_rk4(state, params, 0.01)

    start = time.perf_counter()
    for _ in range(1000):
        state = step_rk4(state, params, 0.01)
    elapsed = time.perf_counter() - start

    assert state.max_abs_deviation() < 1e-12
    assert elapsed < 1.0


def test_constant_velocity_decays_exponentially(grid_1d, params):
    """
    Constant u_i = c with everything else at equilibrium solves u̇ = −u.

    Expected: c·e^{−dt} up to the RK4 truncation error O(dt⁵)
    """
    dt = 0.1
    state = BepState.equilibrium(grid_1d)
    state = BepState(grid_1d, state.rho_i, np.full((1, 64), 0.2), state.rho_e, state.u_e)

    result = step_rk4(state, params, dt)

    np.testing.assert_allclose(result.u_i, 0.2 * np.exp(-dt), atol=0.2 * dt**5 / 60)


def test_rk4_self_convergence_order_four(params, bep_state_factory):
    """
    Halving dt reduces the error at a fixed time by about 16.

    Expected: observed order 4 ± 0.2
    """
    grid = make_grid(1, 32)
    initial = bep_state_factory(grid, seed=3, amplitude=0.1, kmax=2)
    t_final = 0.4

    def run(steps):
        state = initial
        for _ in range(steps):
            state = step_rk4(state, params, t_final / steps)
        return np.concatenate([f.ravel() for f in state.fields])

    coarse, medium, fine = run(8), run(16), run(32)
    ratio = np.linalg.norm(coarse - medium) / np.linalg.norm(medium - fine)

    assert np.log2(ratio) == pytest.approx(4.0, abs=0.2)


def test_step_keeps_charge_neutral(grid_2d, params, bep_state_factory):
    """The charge integral stays at roundoff level after a step."""
    state = bep_state_factory(grid_2d, seed=4)

    result = step_rk4(state, params, 0.05)

    assert abs(grid_2d.integrate(result.rho_i - result.rho_e)) < 1e-12


# Tests for integrate


def test_integrate_zero_horizon(grid_1d, params, bep_state_factory):
    """t_end = 0 gives only the initial sample."""
    state = bep_state_factory(grid_1d)

    traj = integrate(state, params, StepPolicy(t_end=0.0, sample_interval=0.1))

    assert len(traj) == 1
    assert traj[0].t == 0.0
    assert traj.system == System.BEP


def test_integrate_equilibrium_stays_put(grid_1d, params):
    """Every sample of an equilibrium run is the equilibrium."""
    traj = integrate(
        BepState.equilibrium(grid_1d), params, StepPolicy(t_end=10.0, sample_interval=1.0)
    )

    assert len(traj) == 11
    for sample in traj:
        assert sample.state.max_abs_deviation() == 0.0
        assert np.all(sample.E == 0.0)


def test_integrate_lands_on_sample_times(grid_1d, params, bep_state_factory):
    """Sample times are exactly the policy's, including a truncated t_end."""
    policy = StepPolicy(t_end=0.35, sample_interval=0.1)

    traj = integrate(bep_state_factory(grid_1d), params, policy)

    np.testing.assert_array_equal(traj.times, policy.sample_times())
    assert traj.final.t == 0.35


def test_integrate_conserves_mass_and_charge(grid_1d, params, bep_state_factory):
    """Per-species masses drift by less than 1e-12 relative; charge below 1e-12."""
    state = bep_state_factory(grid_1d, seed=9)
    mass_i = grid_1d.integrate(state.rho_i)
    mass_e = grid_1d.integrate(state.rho_e)

    traj = integrate(state, params, StepPolicy(t_end=2.0, sample_interval=0.5))

    for sample in traj:
        s = sample.state
        assert abs(grid_1d.integrate(s.rho_i) - mass_i) < 1e-12 * mass_i
        assert abs(grid_1d.integrate(s.rho_e) - mass_e) < 1e-12 * mass_e
        assert abs(grid_1d.integrate(s.rho_i - s.rho_e)) < 1e-12


def test_integrate_damps_electron_perturbation(grid_1d, params, uep_state_factory):
    """A small UEP perturbation is smaller at t = 5 than initially."""
    state = uep_state_factory(grid_1d, seed=1, amplitude=0.05)

    traj = integrate(state, params, StepPolicy(t_end=5.0, sample_interval=1.0))

    def size(s):
        return sobolev_norm(grid_1d, s.rho_e - 1, 2) + sobolev_norm(grid_1d, s.u_e, 2)

    assert traj.system == System.UEP
    assert size(traj.final.state) < size(traj[0].state)


def test_integrate_reports_failure_time(grid_1d):
    """
    A large perturbation with a weak pressure crashes through the floor.

    Expected: IntegrationError carrying a positive failure time
    """
    (x,) = grid_1d.coordinates()
    params = PlasmaParams(epsilon=0.5, electron_law=PressureLaw(K=0.01, gamma=2.0))
    state = UepState(grid_1d, grid_1d.ones(), 8.0 * np.sin(x)[None])

    with pytest.raises(IntegrationError) as exc_info:
        integrate(state, params, StepPolicy(t_end=5.0, sample_interval=0.5))

    assert exc_info.value.time > 0
