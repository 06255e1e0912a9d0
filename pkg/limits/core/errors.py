"""Error variables between BEP and its limit, and their norms."""

from __future__ import annotations

import numpy as np

from plasma.core.equations import state_field
from plasma.core.types import BepState, Trajectory, UepState
from spectral.core.norms import sobolev_norm, sobolev_norm_squared
from spectral.exceptions import FieldShapeError

from .types import ErrorVars, LimitSample, ProfileSeries, ProfileState

ERROR_FIELDS = ("N_i", "N_e", "w_i", "w_e", "F")


def error_vars(bep: BepState, uep: UepState, prof: ProfileState, eps: float) -> ErrorVars:
    """
    Compute (ρ_i − 1, ρ_e − ρ̄_e, ε⁻²u_i − ū_i, u_e − ū_e, ∇φ − ∇φ̄).

    Raises:
        FieldShapeError: if the three inputs do not share a grid
    """
    grid = bep.grid
    for other in (uep.grid, prof.grid):
        if not grid.is_same(other):
            raise FieldShapeError(
                "BEP, UEP and profile states live on different grids",
                grid.vector_shape,
                other.vector_shape,
            )
    _, E = state_field(bep)
    _, E_bar = state_field(uep)
    return ErrorVars(
        grid=grid,
        N_i_err=bep.rho_i - 1,
        N_e_err=bep.rho_e - uep.rho_e,
        w_i=bep.u_i / eps**2 - prof.u_bar_i,
        w_e=bep.u_e - uep.u_e,
        F=E - E_bar,
    )


def error_dissipation(err: ErrorVars, order: int) -> float:
    """‖𝓝_e‖² + ‖𝓝_i‖² + ‖w_e‖² + ‖𝓕‖² in H^order; w_i is not part of it."""
    grid = err.grid
    fields = (err.N_e_err, err.N_i_err, err.w_e, err.F)
    return float(sum(sobolev_norm_squared(grid, f, order) for f in fields))


def error_norms(err: ErrorVars, order: int) -> dict[str, float]:
    """Each error field's H^order norm, keyed by ERROR_FIELDS."""
    grid = err.grid
    fields = (err.N_i_err, err.N_e_err, err.w_i, err.w_e, err.F)
    return {name: sobolev_norm(grid, f, order) for name, f in zip(ERROR_FIELDS, fields)}


def limit_samples(
    bep_traj: Trajectory, uep_traj: Trajectory, profiles: ProfileSeries
) -> list[LimitSample]:
    """
    Pair BEP, UEP and profile samples taken at the same times.

    Raises:
        ValueError: if the three series are not sampled at identical times
    """
    times = bep_traj.times
    if not (np.array_equal(times, uep_traj.times) and np.array_equal(times, profiles.times)):
        raise ValueError("BEP, UEP and profile series must share their sample times")
    return [
        LimitSample(float(t), bep.state, uep.state, profiles.at(k))
        for k, (t, bep, uep) in enumerate(zip(times, bep_traj, uep_traj))
    ]
