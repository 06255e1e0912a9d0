"""Custom exceptions for experiment configuration, rate fitting and sweeps."""

from __future__ import annotations


class ExperimentError(Exception):
    """Base exception for experiment harness errors."""

    pass


class ConfigError(ExperimentError):
    """Raised when an experiment configuration is invalid; collects every problem found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("Invalid configuration: " + "; ".join(self.errors))


class LogDomainError(ExperimentError):
    """Raised when a log-log fit meets a nonpositive value."""

    def __init__(self, value: float, index: int):
        self.value = value
        self.index = index
        super().__init__(f"Cannot take the logarithm of value {value!r} at point {index}")


class CaseFailedError(ExperimentError):
    """Raised when a single ε case fails; records ε and the failure time."""

    def __init__(self, eps: float, time: float | None, cause: Exception):
        self.eps = eps
        self.time = time
        self.cause = cause
        where = f" at t={time:.6g}" if time is not None else ""
        super().__init__(f"Case eps={eps:g} failed{where}: {cause}")
