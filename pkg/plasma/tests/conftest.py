"""
Shared fixtures for plasma tests.
"""

import pytest

from plasma.core.types import BepState, PlasmaParams, PressureLaw, UepState
from spectral.core.grid import make_grid


@pytest.fixture
def grid_1d():
    """1D grid with 64 points."""
    return make_grid(1, 64)


@pytest.fixture
def grid_2d():
    """2D grid with 16 points per axis."""
    return make_grid(2, 16)


@pytest.fixture
def params():
    """ε = 0.5 with γ = 2, K = 1 for both species and s = 2."""
    return PlasmaParams(epsilon=0.5)


@pytest.fixture
def isothermal_params():
    """ε = 0.5 with isothermal laws for both species."""
    law = PressureLaw(K=1.0, gamma=1.0)
    return PlasmaParams(epsilon=0.5, ion_law=law, electron_law=law)


@pytest.fixture
def bep_state_factory(random_field_factory):
    """Factory fixture for smooth, charge-neutral BEP states near equilibrium."""

    def _create_state(grid, seed: int = 0, amplitude: float = 0.1, kmax: int = 3) -> BepState:
        """Create a perturbation of (1, 0, 1, 0) with zero-mean density deviations.

        Args:
            grid: grid to build the state on
            seed: base seed; the four fields use consecutive seeds
            amplitude: maximum pointwise deviation of each field
            kmax: largest retained wavenumber per axis
        """
        return BepState(
            grid,
            rho_i=1 + random_field_factory(grid, seed, kmax, zero_mean=True, amplitude=amplitude),
            u_i=random_field_factory(grid, seed + 1, kmax, vector=True, amplitude=amplitude),
            rho_e=1
            + random_field_factory(grid, seed + 2, kmax, zero_mean=True, amplitude=amplitude),
            u_e=random_field_factory(grid, seed + 3, kmax, vector=True, amplitude=amplitude),
        )

    return _create_state


@pytest.fixture
def uep_state_factory(random_field_factory):
    """Factory fixture for smooth UEP states over the unit background."""

    def _create_state(grid, seed: int = 0, amplitude: float = 0.1, kmax: int = 3) -> UepState:
        return UepState(
            grid,
            rho_e=1 + random_field_factory(grid, seed, kmax, zero_mean=True, amplitude=amplitude),
            u_e=random_field_factory(grid, seed + 1, kmax, vector=True, amplitude=amplitude),
        )

    return _create_state
