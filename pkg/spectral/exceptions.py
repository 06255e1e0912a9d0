"""Custom exceptions for the spectral substrate."""

from __future__ import annotations


class SpectralError(Exception):
    """Base exception for spectral grid and operator errors."""

    pass


class InvalidGridError(SpectralError):
    """Raised when the number of points per axis is odd or too small."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"Points per axis must be even and >= 8; got n={n}")


class InvalidDimensionError(SpectralError):
    """Raised when the torus dimension is outside 1-3."""

    def __init__(self, d: int):
        self.d = d
        super().__init__(f"Dimension must be 1, 2 or 3; got d={d}")


class FieldShapeError(SpectralError):
    """Raised when a field does not match the grid or the operator arity."""

    def __init__(self, message: str, expected: tuple[int, ...], actual: tuple[int, ...]):
        super().__init__(f"{message} (expected shape {expected}, got {actual})")
        self.expected = expected
        self.actual = actual


class CompatibilityError(SpectralError):
    """
    Raised when a right-hand side that must be mean-free is not.

    On the torus the Poisson problem is only solvable for zero-mean data, so in the
    plasma models this signals a loss of charge neutrality.
    """

    def __init__(self, mean: float, tolerance: float):
        self.mean = mean
        self.tolerance = tolerance
        super().__init__(
            f"Right-hand side has nonzero mean {mean:.3e} (tolerance {tolerance:.3e})"
        )
