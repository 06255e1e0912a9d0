"""
Shared fixtures for spectral tests.
"""

import pytest

from spectral.core.grid import make_grid


@pytest.fixture
def grid_1d():
    """1D grid with 64 points."""
    return make_grid(1, 64)


@pytest.fixture
def grid_2d():
    """2D grid with 32 points per axis."""
    return make_grid(2, 32)


@pytest.fixture
def grid_3d():
    """3D grid with 16 points per axis."""
    return make_grid(3, 16)
