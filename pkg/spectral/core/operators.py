"""
Spectral differential operators and the zero-mean Poisson inversion.

All operators are exact on the trigonometric interpolant of their input and return
freshly allocated arrays. They work on the half spectrum of the real transforms.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ..exceptions import CompatibilityError, FieldShapeError
from .grid import TorusGrid

MEAN_RTOL = 1e-12


class DiffKind(str, Enum):
    """Which differential operator `apply_diff` evaluates."""

    GRADIENT = "gradient"
    DIVERGENCE = "divergence"
    LAPLACIAN = "laplacian"


def gradient(grid: TorusGrid, f: np.ndarray) -> np.ndarray:
    f = grid.check_scalar(f)
    return grid.rinverse(grid.real_gradient_symbol * grid.rforward(f))


def divergence(grid: TorusGrid, g: np.ndarray) -> np.ndarray:
    g = grid.check_vector(g)
    return grid.rinverse(np.sum(grid.real_gradient_symbol * grid.rforward(g), axis=0))


def laplacian(grid: TorusGrid, f: np.ndarray) -> np.ndarray:
    f = grid.check_scalar(f)
    return grid.rinverse(-grid.real_k_squared * grid.rforward(f))


def curl(grid: TorusGrid, g: np.ndarray) -> np.ndarray:
    """
    Curl of a vector field: a scalar for d=2, a vector for d=3.

    Raises:
        FieldShapeError: for d=1, where the curl is not defined
    """
    g = grid.check_vector(g)
    if grid.d == 1:
        raise FieldShapeError("curl needs d >= 2", (2,), (grid.d,))

    g_hat = grid.rforward(g)
    ik = grid.real_gradient_symbol

    def d_(j: int, c: int) -> np.ndarray:
        return ik[j] * g_hat[c]

    if grid.d == 2:
        return grid.rinverse(d_(0, 1) - d_(1, 0))
    return grid.rinverse(
        np.stack([d_(1, 2) - d_(2, 1), d_(2, 0) - d_(0, 2), d_(0, 1) - d_(1, 0)])
    )


_DISPATCH = {
    DiffKind.GRADIENT: gradient,
    DiffKind.DIVERGENCE: divergence,
    DiffKind.LAPLACIAN: laplacian,
}


def apply_diff(grid: TorusGrid, kind: DiffKind | str, f: np.ndarray) -> np.ndarray:
    """
    Apply a spectral differential operator.

    Args:
        grid: grid the field lives on
        kind: gradient (scalar -> vector), divergence (vector -> scalar)
            or laplacian (scalar -> scalar)
        f: nodal values

    Returns:
        The exact derivative of the trigonometric interpolant of f

    Raises:
        FieldShapeError: if the field arity does not match the operator
    """
    return _DISPATCH[DiffKind(kind)](grid, f)


def check_mean_free(grid: TorusGrid, rhs: np.ndarray, scale: float | None = None) -> None:
    """
    Enforce the solvability condition mean(rhs) = 0 at machine level.

    The tolerance is 1e-12 times the L2 norm of rhs. When rhs is a difference of
    O(1) fields, pass their magnitude as `scale` so the check is made relative to it.
    """
    norm = float(np.sqrt(np.vdot(rhs, rhs) * grid.cell_volume))
    tolerance = MEAN_RTOL * max(norm, scale or 0.0)
    mean = float(grid.mean(rhs))
    if abs(mean) > tolerance:
        raise CompatibilityError(mean, tolerance)


def inverse_laplacian_hat(grid: TorusGrid, rhs_hat: np.ndarray) -> np.ndarray:
    """Half spectrum of Δ⁻¹ applied to a half spectrum; the k=0 mode is set to zero."""
    return grid.real_inverse_laplacian_symbol * rhs_hat


def nyquist_part(grid: TorusGrid, f: np.ndarray) -> np.ndarray:
    """Component of f carried by modes with some |k_j| = n/2."""
    return grid.rinverse(grid.rforward(f) * ~grid.real_band_mask)


def solve_poisson_zero_mean(
    grid: TorusGrid, rhs: np.ndarray, scale: float | None = None
) -> np.ndarray:
    """
    Solve Δφ = rhs on the torus with ∫φ dx = 0.

    Args:
        grid: the grid
        rhs: scalar right-hand side; must be mean-free
        scale: optional magnitude the mean-free check is measured against

    Returns:
        The zero-mean potential φ

    Raises:
        CompatibilityError: if rhs has a nonzero mean
    """
    rhs = grid.check_scalar(rhs, "rhs")
    check_mean_free(grid, rhs, scale)
    return grid.rinverse(inverse_laplacian_hat(grid, grid.rforward(rhs)))


def grad_inv_laplacian(grid: TorusGrid, z: np.ndarray, scale: float | None = None) -> np.ndarray:
    """
    Return g = ∇Δ⁻¹z: curl-free, with div g = z for band-limited z.

    Precondition: z carries no Nyquist content (no mode with |k_j| = n/2). A gradient
    cannot reach those modes, so z is projected onto the band first and the result
    satisfies div g = z − nyquist_part(z) in general. Dealiased fields and divergences
    always meet the precondition.

    Raises:
        CompatibilityError: if z has a nonzero mean
    """
    z = grid.check_scalar(z, "z")
    check_mean_free(grid, z, scale)
    z_hat = grid.rforward(z) * grid.real_band_mask
    return grid.rinverse(grid.real_gradient_symbol * inverse_laplacian_hat(grid, z_hat))
