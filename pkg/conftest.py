"""
Fixtures shared by every app's tests.

Consolidates the seeded random-field construction used across spectral, plasma and
limits tests.
"""

import numpy as np
import pytest


@pytest.fixture
def random_field_factory():
    """Factory fixture for smooth random fields.

    The returned function builds fields whose spectrum is confined to |k_j| <= kmax,
    which keeps them resolved and free of the unpaired Nyquist mode.
    """

    def _create_field(
        grid,
        seed: int = 0,
        kmax: int = 4,
        vector: bool = False,
        zero_mean: bool = False,
        amplitude: float = 1.0,
    ) -> np.ndarray:
        """Create a band-limited random field.

        Args:
            grid: grid to build the field on
            seed: seed for the generator (fields are deterministic)
            kmax: largest retained wavenumber per axis
            vector: build a vector field instead of a scalar
            zero_mean: remove the k=0 mode
            amplitude: the field is rescaled so its maximum magnitude equals this

        Returns:
            Real nodal values with shape grid.shape or grid.vector_shape
        """
        rng = np.random.default_rng(seed)
        shape = grid.vector_shape if vector else grid.shape
        raw = rng.standard_normal(shape)
        band = np.all(np.abs(grid.wavenumbers) <= kmax, axis=0)
        if zero_mean:
            band = band & (grid.k_squared > 0)
        field = grid.inverse(grid.forward(raw) * band)
        return amplitude * field / np.max(np.abs(field))

    return _create_field
