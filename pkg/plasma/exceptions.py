"""Custom exceptions for the plasma models and their time integration."""

from __future__ import annotations


class PlasmaError(Exception):
    """Base exception for model and integration errors."""

    pass


class DensityFloorError(PlasmaError):
    """
    Raised when a density drops to or below the admissible floor.

    The models are only valid near equilibrium; crossing the floor aborts the run
    instead of clipping.
    """

    def __init__(self, species: str, minimum: float, floor: float, time: float | None = None):
        self.species = species
        self.minimum = minimum
        self.floor = floor
        self.time = time
        where = f" at t={time:.6g}" if time is not None else ""
        super().__init__(
            f"{species} density minimum {minimum:.6g} is below the floor {floor:.6g}{where}"
        )


class UnstableStateError(PlasmaError):
    """Raised when the characteristic speed of a state is not finite."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class InsufficientDataError(PlasmaError):
    """Raised when a sampled series is too short for the requested diagnostic."""

    def __init__(self, message: str, available: int, required: int):
        super().__init__(f"{message} (have {available} samples, need {required})")
        self.available = available
        self.required = required


class IntegrationError(PlasmaError):
    """Raised when time integration fails; records where it failed."""

    def __init__(self, time: float, cause: Exception):
        self.time = time
        self.cause = cause
        super().__init__(f"Integration failed at t={time:.6g}: {cause}")
