"""
Shared fixtures for limits tests.
"""

import pytest

from limits.core.data import well_prepared_data
from limits.core.errors import limit_samples
from limits.core.profiles import solve_profiles
from limits.core.types import WellPreparedFamily
from plasma.core.timestep import integrate
from plasma.core.types import PlasmaParams, StepPolicy
from spectral.core.grid import make_grid


@pytest.fixture
def grid_1d():
    """1D grid with 32 points."""
    return make_grid(1, 32)


@pytest.fixture
def grid_2d():
    """2D grid with 16 points per axis."""
    return make_grid(2, 16)


@pytest.fixture
def default_family(grid_1d):
    """The desk-scale family: sin/cos shapes with δ₀ = 0.05."""
    return WellPreparedFamily.default(grid_1d)


@pytest.fixture
def limit_run_factory():
    """Factory fixture running BEP, UEP and the profiles from one family."""

    def _run(family, eps: float, sample_interval: float, t_end: float = 0.5):
        """Integrate both systems and pair their samples with the profiles.

        Returns:
            list of LimitSample at the policy's sample times
        """
        params = PlasmaParams(epsilon=eps)
        policy = StepPolicy(t_end=t_end, sample_interval=sample_interval)
        bep0, uep0, prof0 = well_prepared_data(family, eps)
        bep_traj = integrate(bep0, params, policy)
        uep_traj = integrate(uep0, params, policy)
        profiles = solve_profiles(uep_traj, prof0.u_bar_i, prof0.rho_bar_i1)
        return limit_samples(bep_traj, uep_traj, profiles)

    return _run
