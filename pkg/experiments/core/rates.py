"""
Log-log rate fits and reductions of sampled time series.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from plasma.exceptions import InsufficientDataError

from ..exceptions import LogDomainError
from .types import MIN_RATE_POINTS, RateFit


def _logs(values: np.ndarray) -> np.ndarray:
    for index, value in enumerate(values):
        if not value > 0:
            raise LogDomainError(float(value), index)
    return np.log(values)


def _line_fit(x: np.ndarray, y: np.ndarray, quantity: str) -> RateFit:
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_res = float(np.sum(residual**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(np.clip(r_squared, 0.0, 1.0)),
        quantity=quantity,
        n_points=len(x),
    )


def fit_rate(points: Iterable[tuple[float, float]], quantity: str = "") -> RateFit:
    """
    Least-squares line through (log ε, log value).

    Args:
        points: (ε, value) pairs
        quantity: name carried on the fit

    Returns:
        RateFit whose slope is the observed order in ε

    Raises:
        InsufficientDataError: fewer than three points
        LogDomainError: if any ε or value is nonpositive
        ValueError: if the ε values are not distinct enough to fit a line
    """
    pairs = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pairs) < MIN_RATE_POINTS:
        raise InsufficientDataError("Rate fit needs more points", len(pairs), MIN_RATE_POINTS)
    x = _logs(pairs[:, 0])
    y = _logs(pairs[:, 1])
    if np.unique(x).size < 2:
        raise ValueError("Rate fit needs at least two distinct epsilon values")
    return _line_fit(x, y, quantity)


def fit_decay(
    times: Sequence[float],
    values: Sequence[float],
    window: tuple[float, float],
    quantity: str = "",
) -> RateFit:
    """
    Least-squares line through (t, log value) for t inside the closed window.

    A negative slope is an exponential decay rate.

    Raises:
        InsufficientDataError: fewer than three samples inside the window
        LogDomainError: if a value inside the window is nonpositive
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    start, end = window
    inside = (times >= start - 1e-12) & (times <= end + 1e-12)
    if np.count_nonzero(inside) < MIN_RATE_POINTS:
        raise InsufficientDataError(
            f"Decay fit window [{start}, {end}] holds too few samples",
            int(np.count_nonzero(inside)),
            MIN_RATE_POINTS,
        )
    return _line_fit(times[inside], _logs(values[inside]), quantity)


def sup(values: Sequence[float]) -> float:
    return float(np.max(values))


def trapezoid(times: Sequence[float], values: Sequence[float]) -> float:
    """Trapezoidal time integral on the sample grid; 0 for a single sample."""
    return float(np.trapezoid(np.asarray(values, dtype=float), np.asarray(times, dtype=float)))
