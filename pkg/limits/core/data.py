"""
Well-prepared initial data for the bipolar system, its unipolar limit and the profiles.
"""

from __future__ import annotations

import logging

from plasma.core.types import BepState, UepState
from spectral.core.norms import sobolev_norm

from .types import Cond2Report, ProfileState, WellPreparedFamily

logger = logging.getLogger(__name__)


def well_prepared_data(
    family: WellPreparedFamily, eps: float
) -> tuple[BepState, UepState, ProfileState]:
    """
    Build matching initial data for BEP, UEP and the limiting profiles.

    Ion perturbations are O(ε²), so the singular ion terms vanish at the limit's rate
    and no initial layer forms:

        ρ_i0 = 1 + ε²a_i,  u_i0 = ε²b_i,  ρ_e0 = ρ̄_e0 = 1 + δ₀a_e,  u_e0 = ū_e0 = δ₀v_e,
        ū_i0 = b_i,  ρ̄_i0¹ = a_i

    With ρ̄_i0¹ = a_i the ion stream-function argument ρ_i − 1 − ε²ρ̄_i¹ vanishes at t = 0.

    Args:
        family: ε-independent shapes and electron amplitude
        eps: ε in (0, 1]

    Returns:
        (BEP state, UEP state, profile state) at t = 0

    Raises:
        ValueError: if eps is outside (0, 1]
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1]; got {eps}")
    grid = family.grid
    eps2 = eps**2
    rho_e0 = 1 + family.delta0 * family.a_e
    u_e0 = family.delta0 * family.v_e

    bep = BepState(
        grid,
        rho_i=1 + eps2 * family.a_i,
        u_i=eps2 * family.b_i,
        rho_e=rho_e0,
        u_e=u_e0,
    )
    uep = UepState(grid, rho_e=rho_e0.copy(), u_e=u_e0.copy())
    profile = ProfileState(grid, u_bar_i=family.b_i.copy(), rho_bar_i1=family.a_i.copy())
    return bep, uep, profile


def cond2_report(family: WellPreparedFamily, eps: float, s: int) -> Cond2Report:
    """
    Initial mismatch quantities with C₂ = max(‖a_i‖_{s−1}, ‖b_i‖_s).

    For well-prepared data the electron mismatch vanishes and both ion quantities equal
    ε times a norm bounded by C₂.
    """
    grid = family.grid
    bep, uep, _ = well_prepared_data(family, eps)
    C2 = max(sobolev_norm(grid, family.a_i, s - 1), sobolev_norm(grid, family.b_i, s))
    report = Cond2Report(
        eps=eps,
        C2=C2,
        electron_density=sobolev_norm(grid, bep.rho_e - uep.rho_e, s - 1),
        electron_velocity=sobolev_norm(grid, bep.u_e - uep.u_e, s - 1),
        ion_density=sobolev_norm(grid, bep.rho_i - 1, s - 1) / eps,
        ion_velocity=sobolev_norm(grid, bep.u_i, s) / eps,
    )
    if not report.holds:
        logger.warning("Initial data exceed the C2*eps bound: %s", report)
    return report
