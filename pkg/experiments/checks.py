"""
Invariant suite run by the `check` command.

Each check builds its own small deterministic problem, measures one number and compares
it with a fixed tolerance. The suite never raises for a failed check; it reports it.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from limits.core.profiles import solve_rho_i1, solve_ubar_i
from plasma.core.functionals import energy_functionals
from plasma.core.timestep import step_rk4
from plasma.core.types import BepState, PlasmaParams
from spectral.core.grid import make_grid
from spectral.core.norms import sobolev_norm_squared
from spectral.core.operators import curl, divergence, grad_inv_laplacian, laplacian
from spectral.core.operators import solve_poisson_zero_mean

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class CheckResult:
    """Outcome of one invariant check: the measured value against its tolerance."""

    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""


def _check(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(value <= tolerance), float(value), tolerance, detail=detail)


def _mixed_field(grid):
    coords = grid.coordinates()
    f = 1.0 + 0.0 * coords[0]
    for j, x in enumerate(coords, start=1):
        f = f + np.sin(j * x + 0.3) + 0.5 * np.cos((j + 2) * x)
    return f


def check_round_trip() -> CheckResult:
    grid = make_grid(3, 16)
    f = _mixed_field(grid)
    value = np.max(np.abs(grid.inverse(grid.forward(f)) - f))
    return _check("spectral_round_trip", value, 1e-13)


def check_poisson_inverse() -> CheckResult:
    grid = make_grid(2, 32)
    rhs = _mixed_field(grid)
    rhs = rhs - grid.mean(rhs)
    phi = solve_poisson_zero_mean(grid, rhs)
    value = max(np.max(np.abs(laplacian(grid, phi) - rhs)), abs(grid.mean(phi)))
    return _check("poisson_inverse", value, 1e-10)


def check_norm_identities() -> CheckResult:
    """‖sin kx‖_l² = π·Σ_{m≤l} k^{2m} in one dimension."""
    grid = make_grid(1, 64)
    (x,) = grid.coordinates()
    worst = 0.0
    for k in (1, 2, 3):
        for order in (0, 1, 2):
            exact = np.pi * sum(k ** (2 * m) for m in range(order + 1))
            value = sobolev_norm_squared(grid, np.sin(k * x), order)
            worst = max(worst, abs(value - exact) / exact)
    return _check("norm_identities", worst, 1e-12)


def check_grad_inv_laplacian() -> CheckResult:
    grid = make_grid(2, 32)
    z = _mixed_field(grid)
    z = z - grid.mean(z)
    g = grad_inv_laplacian(grid, z)
    value = max(np.max(np.abs(divergence(grid, g) - z)), np.max(np.abs(curl(grid, g))))
    return _check("grad_inv_laplacian", value, 1e-10)


def check_rk4_order() -> CheckResult:
    """Observed order from three step sizes at a fixed time; passes within 4 ± 0.2."""
    grid = make_grid(1, 32)
    (x,) = grid.coordinates()
    params = PlasmaParams(epsilon=0.5)
    initial = BepState(
        grid,
        rho_i=1 + 0.1 * np.sin(x),
        u_i=0.1 * np.cos(2 * x)[None],
        rho_e=1 + 0.1 * np.cos(x),
        u_e=0.1 * np.sin(2 * x + 0.5)[None],
    )
    t_final = 0.4

    def run(steps: int) -> np.ndarray:
        state = initial
        for _ in range(steps):
            state = step_rk4(state, params, t_final / steps)
        return np.concatenate([f.ravel() for f in state.fields])

    coarse, medium, fine = run(8), run(16), run(32)
    order = float(np.log2(np.linalg.norm(coarse - medium) / np.linalg.norm(medium - fine)))
    return _check("rk4_order", abs(order - 4.0), 0.2, detail=f"observed order {order:.3f}")


def check_profile_analytics() -> CheckResult:
    """Heat modes of the density profile and the constant-forcing velocity profile."""
    grid = make_grid(1, 32)
    (x,) = grid.coordinates()
    dt = 0.05
    times = np.arange(41) * dt
    worst = 0.0
    for k in (1, 2, 3):
        rho = solve_rho_i1(grid, np.zeros((21, 1, 32)), np.sin(k * x), dt)
        expected = np.exp(-(k**2)) * np.sin(k * x)
        worst = max(worst, np.max(np.abs(rho[-1] - expected)) / np.exp(-(k**2)))

    u0 = np.cos(x)[None]
    G = 0.3 * np.sin(2 * x)[None]
    u_bar = solve_ubar_i(grid, np.broadcast_to(G, (len(times), 1, 32)), u0, dt)
    decay = np.exp(-times)[:, None, None]
    worst = max(worst, np.max(np.abs(u_bar - (decay * u0 + (1 - decay) * G))))
    return _check("profile_analytics", worst, 1e-6)


def check_equilibrium_fixed_point() -> CheckResult:
    grid = make_grid(1, 64)
    params = PlasmaParams(epsilon=0.5)
    state = BepState.equilibrium(grid)
    for _ in range(1000):
        state = step_rk4(state, params, 0.01)
    E_total, _ = energy_functionals(state, params)
    return _check("equilibrium_fixed_point", max(state.max_abs_deviation(), E_total), 1e-12)


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_round_trip,
    check_poisson_inverse,
    check_norm_identities,
    check_grad_inv_laplacian,
    check_rk4_order,
    check_profile_analytics,
    check_equilibrium_fixed_point,
)


def run_check() -> list[CheckResult]:
    """Run every check in order, timing each one."""
    results = []
    for check in CHECKS:
        start = time.perf_counter()
        result = check()
        elapsed = time.perf_counter() - start
        results.append(
            CheckResult(
                result.name, result.passed, result.value, result.tolerance, elapsed, result.detail
            )
        )
        log = logger.info if result.passed else logger.error
        log(
            "%s: %s (%.3e <= %.1e)",
            result.name,
            "ok" if result.passed else "FAILED",
            result.value,
            result.tolerance,
        )
    return results
