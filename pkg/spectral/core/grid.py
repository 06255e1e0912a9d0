"""
Periodic grid on the torus [0, 2π)^d with discrete Fourier bookkeeping.

Fields are plain numpy arrays laid out on the grid:
    - scalar fields have shape (n,) * d
    - vector fields have shape (d,) + (n,) * d

Transforms always act on the trailing d axes, so the same calls work for both, with any
number of leading batch axes. Operators and right-hand sides work on the half spectrum of
the real transforms (`rforward`/`rinverse` with the `real_*` tables); the full complex
spectrum (`forward`/`inverse`) serves the norms and the analysis code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..exceptions import FieldShapeError, InvalidDimensionError, InvalidGridError

AXIS_LENGTH = 2.0 * np.pi
MIN_POINTS = 8


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _axis_wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers of one axis in FFT order, the Nyquist mode stored as +n/2."""
    k_axis = np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    k_axis[n // 2] = n // 2
    return k_axis


def _mesh(axes: list[np.ndarray]) -> np.ndarray:
    return np.stack(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True, eq=False)
class TorusGrid:
    """
    Uniform periodic grid with its integer wavenumber table and 2/3-rule dealias mask.

    Wavenumbers run over {-n/2+1, ..., n/2} on every axis, stored in FFT order.
    The Nyquist mode n/2 has no partner, so odd-order derivatives drop it
    (see `derivative_wavenumbers`).

    Validation:
        - d in {1, 2, 3}
        - n even and n >= 8
    """

    d: int
    n: int
    axis_length: float = AXIS_LENGTH
    wavenumbers: np.ndarray = field(init=False, repr=False)
    dealias_mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.d not in (1, 2, 3):
            raise InvalidDimensionError(self.d)
        if self.n < MIN_POINTS or self.n % 2 != 0:
            raise InvalidGridError(self.n)

        wavenumbers = _mesh([_axis_wavenumbers(self.n)] * self.d)
        object.__setattr__(self, "wavenumbers", _frozen(wavenumbers))
        object.__setattr__(self, "dealias_mask", _frozen(self._two_thirds(wavenumbers)))

    def _two_thirds(self, wavenumbers: np.ndarray) -> np.ndarray:
        return np.all(np.abs(wavenumbers) <= self.n / 3.0, axis=0)

    # Geometry

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def vector_shape(self) -> tuple[int, ...]:
        return (self.d,) + self.shape

    @property
    def spacing(self) -> float:
        return self.axis_length / self.n

    @property
    def node_count(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @property
    def volume(self) -> float:
        return self.axis_length**self.d

    @property
    def axes(self) -> tuple[int, ...]:
        """Trailing spatial axes of any field on this grid."""
        return tuple(range(-self.d, 0))

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Nodal coordinates x_1, ..., x_d, each of shape `self.shape`."""
        x = np.arange(self.n) * self.spacing
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))

    def is_same(self, other: TorusGrid) -> bool:
        return self.d == other.d and self.n == other.n and self.axis_length == other.axis_length

    # Wavenumber tables

    @cached_property
    def scale(self) -> float:
        """Physical wavenumber per integer mode (1 on the 2π torus)."""
        return 2.0 * np.pi / self.axis_length

    @cached_property
    def k_squared(self) -> np.ndarray:
        k = self.wavenumbers * self.scale
        return _frozen(np.sum(k * k, axis=0))

    @cached_property
    def derivative_wavenumbers(self) -> np.ndarray:
        """Wavenumbers for odd-order derivatives: the Nyquist mode is zeroed."""
        return self._odd_symbol(self.wavenumbers)

    def _odd_symbol(self, wavenumbers: np.ndarray) -> np.ndarray:
        k = (wavenumbers * self.scale).astype(float)
        k[wavenumbers == self.n // 2] = 0.0
        return _frozen(k)

    # Half-spectrum tables (last axis holds 0..n/2 only)

    @cached_property
    def real_wavenumbers(self) -> np.ndarray:
        full = _axis_wavenumbers(self.n)
        return _frozen(_mesh([full] * (self.d - 1) + [np.arange(self.n // 2 + 1)]))

    @cached_property
    def real_dealias_mask(self) -> np.ndarray:
        return _frozen(self._two_thirds(self.real_wavenumbers))

    @cached_property
    def real_band_mask(self) -> np.ndarray:
        """False on every mode with some |k_j| = n/2, where odd derivatives vanish."""
        return _frozen(np.all(np.abs(self.real_wavenumbers) < self.n // 2, axis=0))

    @cached_property
    def real_k_squared(self) -> np.ndarray:
        k = self.real_wavenumbers * self.scale
        return _frozen(np.sum(k * k, axis=0))

    @cached_property
    def real_inverse_laplacian_symbol(self) -> np.ndarray:
        """−1/|k|² on the half spectrum, 0 on the mean mode."""
        k2 = self.real_k_squared
        symbol = np.zeros_like(k2)
        symbol[k2 > 0] = -1.0 / k2[k2 > 0]
        return _frozen(symbol)

    @cached_property
    def real_gradient_symbol(self) -> np.ndarray:
        """i·k on the half spectrum, Nyquist dropped; shape (d,) + half-spectrum shape."""
        return _frozen(1j * self._odd_symbol(self.real_wavenumbers))

    @cached_property
    def real_dealiased_gradient_symbol(self) -> np.ndarray:
        """i·k with the 2/3 mask folded in: the gradient of the dealiased field."""
        return _frozen(self.real_gradient_symbol * self.real_dealias_mask)

    # Field validation

    def check_scalar(self, f: np.ndarray, name: str = "field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise FieldShapeError(f"{name} is not a scalar field on this grid", self.shape, f.shape)
        return f

    def check_vector(self, g: np.ndarray, name: str = "field") -> np.ndarray:
        g = np.asarray(g, dtype=float)
        if g.shape != self.vector_shape:
            raise FieldShapeError(
                f"{name} is not a vector field on this grid", self.vector_shape, g.shape
            )
        return g

    def check_field(self, f: np.ndarray, name: str = "field") -> np.ndarray:
        """Accept either a scalar or a vector field."""
        f = np.asarray(f, dtype=float)
        if f.shape not in (self.shape, self.vector_shape):
            raise FieldShapeError(f"{name} does not live on this grid", self.shape, f.shape)
        return f

    # Transforms and quadrature

    def forward(self, f: np.ndarray) -> np.ndarray:
        return np.fft.fftn(f, axes=self.axes)

    def inverse(self, f_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(f_hat, axes=self.axes).real

    def rforward(self, f: np.ndarray) -> np.ndarray:
        """Half-spectrum transform of real data."""
        return np.fft.rfftn(f, axes=self.axes)

    def rinverse(self, f_hat: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(f_hat, s=self.shape, axes=self.axes)

    def dealias(self, f: np.ndarray) -> np.ndarray:
        """Zero every mode with some |k_j| > n/3."""
        return self.rinverse(self.rforward(f) * self.real_dealias_mask)

    def integrate(self, f: np.ndarray) -> np.ndarray | float:
        """Rectangle-rule integral over the torus, exact for band-limited fields."""
        return np.sum(f, axis=self.axes) * self.cell_volume

    def mean(self, f: np.ndarray) -> np.ndarray | float:
        return np.mean(f, axis=self.axes)

    def zeros(self, vector: bool = False) -> np.ndarray:
        return np.zeros(self.vector_shape if vector else self.shape)

    def ones(self) -> np.ndarray:
        return np.ones(self.shape)


def make_grid(d: int, n: int) -> TorusGrid:
    """
    Build a d-dimensional periodic grid with n points per axis on [0, 2π)^d.

    Raises:
        InvalidDimensionError: d outside 1-3
        InvalidGridError: n odd or smaller than 8
    """
    return TorusGrid(d=d, n=n)
