"""
Pressure laws, the electric field, and the semi-discrete right-hand sides.

The bipolar system is advanced in the scaled convective form

    ∂t ρ_i + div(ρ_i u_i) = 0
    ∂t u_i + (u_i·∇)u_i + ε²∇h_i(ρ_i) = ε²∇φ − u_i
    ∂t ρ_e + div(ρ_e u_e) = 0
    ∂t u_e + (u_e·∇)u_e + ∇h_e(ρ_e) = −∇φ − u_e
    Δφ = ρ_i − ρ_e,  ∫φ dx = 0

and the unipolar (electron-only) limit replaces ρ_i by a fixed background b (b ≡ 1 in
the infinity-ion-mass limit). Densities are in conservative form, velocities in
convective form; every nonlinear term is dealiased by the 2/3 rule. All species of a system
share one batch of half-spectrum transforms per right-hand side evaluation.
"""

from __future__ import annotations

import numpy as np

from spectral.core.grid import TorusGrid
from spectral.core.operators import check_mean_free, inverse_laplacian_hat

from ..exceptions import DensityFloorError
from .types import DENSITY_FLOOR, BepState, PlasmaParams, PressureLaw, State, UepState

Tendency = tuple[np.ndarray, ...]


# Pressure and enthalpy


def _require_positive(rho: np.ndarray, species: str) -> None:
    minimum = float(np.min(rho))
    if not minimum > 0:
        raise DensityFloorError(species, minimum, 0.0)


def pressure(law: PressureLaw, rho: np.ndarray) -> np.ndarray:
    return law.K * rho**law.gamma


def pressure_prime(law: PressureLaw, rho: np.ndarray) -> np.ndarray:
    return law.K * law.gamma * rho ** (law.gamma - 1)


def sound_speed(law: PressureLaw, rho: np.ndarray) -> np.ndarray:
    """√p′(ρ)."""
    return np.sqrt(pressure_prime(law, rho))


def enthalpy(law: PressureLaw, rho: np.ndarray, species: str = "density") -> np.ndarray:
    """
    Enthalpy h with h′(ρ) = p′(ρ)/ρ, normalized by h(1) = 0.

    Args:
        law: the pressure law
        rho: density field (strictly positive)
        species: label used in the error message

    Returns:
        Kγ(ρ^{γ−1} − 1)/(γ − 1) for γ > 1, K·ln ρ for γ = 1

    Raises:
        DensityFloorError: if any density is nonpositive
    """
    _require_positive(rho, species)
    return _enthalpy_values(law, rho)


def _enthalpy_values(law: PressureLaw, rho: np.ndarray) -> np.ndarray:
    if law.is_isothermal:
        return law.K * np.log(rho)
    g = law.gamma
    return law.K * g * (rho ** (g - 1) - 1) / (g - 1)


def enthalpy_prime(law: PressureLaw, rho: np.ndarray, species: str = "density") -> np.ndarray:
    """h′(ρ) = Kγρ^{γ−2}."""
    _require_positive(rho, species)
    return law.K * law.gamma * rho ** (law.gamma - 2)


def enthalpy_potential(law: PressureLaw, rho: np.ndarray, species: str = "density") -> np.ndarray:
    """
    Pressure potential H with H′ = h and H(1) = 0.

    H is convex with a double zero at ρ = 1, so it acts as a relative entropy.
    """
    _require_positive(rho, species)
    if law.is_isothermal:
        return law.K * (rho * np.log(rho) - rho + 1)
    g = law.gamma
    return law.K * (rho**g - 1) / (g - 1) - law.K * g * (rho - 1) / (g - 1)


# State checks and the electric field


def check_state(state: State, floor: float = DENSITY_FLOOR, time: float | None = None) -> None:
    """
    Raise DensityFloorError if any density of the state is below the floor.
    """
    for species, rho in state.densities().items():
        minimum = float(np.min(rho))
        if not minimum >= floor:
            raise DensityFloorError(species.value, minimum, floor, time)


def _charge_scale(grid: TorusGrid, rho_i: np.ndarray, rho_e: np.ndarray) -> float:
    return float(np.sqrt(max(np.vdot(rho_i, rho_i), np.vdot(rho_e, rho_e)) * grid.cell_volume))


def _potential_hat(grid: TorusGrid, rho_i: np.ndarray, rho_e: np.ndarray) -> np.ndarray:
    # The difference of two O(1) fields is only mean-free up to their own roundoff.
    charge = rho_i - rho_e
    check_mean_free(grid, charge, _charge_scale(grid, rho_i, rho_e))
    return inverse_laplacian_hat(grid, grid.rforward(charge))


def electric_field(
    grid: TorusGrid, rho_i: np.ndarray, rho_e: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Potential and field from Δφ = ρ_i − ρ_e with ∫φ dx = 0.

    Charge neutrality is checked against the size of the densities themselves.

    Returns:
        (φ, ∇φ)

    Raises:
        CompatibilityError: if the densities are not charge neutral
    """
    phi_hat = _potential_hat(grid, rho_i, rho_e)
    return grid.rinverse(phi_hat), grid.rinverse(grid.real_gradient_symbol * phi_hat)


def state_field(state: State) -> tuple[np.ndarray, np.ndarray]:
    """(φ, ∇φ) of a BEP state, or (φ̄, ∇φ̄) of a UEP state."""
    if isinstance(state, BepState):
        return electric_field(state.grid, state.rho_i, state.rho_e)
    return electric_field(state.grid, state.ion_density, state.rho_e)


# Right-hand sides


def _transport(
    grid: TorusGrid,
    rho: np.ndarray,
    u: np.ndarray,
    h: np.ndarray,
    coefficient: np.ndarray,
    force_hat: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Mass and momentum tendencies of m species at once.

        ∂tρ = −div P(ρu)
        ∂tu = −P((u·∇)u) − c·∇P(h) + F − u

    with P the 2/3 projection. Inputs are stacked along a leading species axis: ρ and h
    of shape (m,) + grid.shape, u of shape (m, d) + grid.shape, c of shape (m,), and the
    force as a half spectrum of shape (m, d) + half-spectrum shape.
    """
    d = grid.d
    ik = grid.real_gradient_symbol
    ik_masked = grid.real_dealiased_gradient_symbol

    u_hat = grid.rforward(u)
    # jacobian[m, j, c] = ∂_j u_c
    jacobian = grid.rinverse(ik[None, :, None] * u_hat[:, None])
    advection = np.einsum("mj...,mjc...->mc...", u, jacobian)

    products_hat = grid.rforward(np.concatenate([rho[:, None] * u, advection, h[:, None]], axis=1))
    flux_hat = products_hat[:, :d]
    advection_hat = products_hat[:, d:-1]
    h_hat = products_hat[:, -1:]

    c = coefficient.reshape((-1,) + (1,) * (d + 1))
    tendency_hat = np.empty((rho.shape[0], d + 1) + ik.shape[1:], dtype=complex)
    tendency_hat[:, 0] = -np.sum(ik_masked * flux_hat, axis=1)
    tendency_hat[:, 1:] = force_hat - grid.real_dealias_mask * advection_hat - c * ik_masked * h_hat
    tendency = grid.rinverse(tendency_hat)
    return tendency[:, 0], tendency[:, 1:] - u


def bep_rhs(state: BepState, params: PlasmaParams) -> Tendency:
    """
    Tendency (∂tρ_i, ∂tu_i, ∂tρ_e, ∂tu_e) of the scaled bipolar system.

    Args:
        state: current BEP state
        params: ε and the pressure laws

    Returns:
        Tuple of tendencies in the field order of BepState

    Raises:
        DensityFloorError: if a density is below the floor
        CompatibilityError: if the state is not charge neutral
    """
    check_state(state, params.density_floor)
    grid = state.grid
    eps2 = params.epsilon**2
    E_hat = grid.real_gradient_symbol * _potential_hat(grid, state.rho_i, state.rho_e)

    h_i = _enthalpy_values(params.ion_law, state.rho_i)
    h_e = _enthalpy_values(params.electron_law, state.rho_e)
    d_rho, d_u = _transport(
        grid,
        rho=np.stack([state.rho_i, state.rho_e]),
        u=np.stack([state.u_i, state.u_e]),
        h=np.stack([h_i, h_e]),
        coefficient=np.array([eps2, 1.0]),
        force_hat=np.stack([eps2 * E_hat, -E_hat]),
    )
    return (d_rho[0], d_u[0], d_rho[1], d_u[1])


def uep_rhs(state: UepState, law: PressureLaw, floor: float = DENSITY_FLOOR) -> Tendency:
    """
    Tendency (∂tρ̄_e, ∂tū_e) of the unipolar system with Δφ̄ = b − ρ̄_e.

    Raises:
        DensityFloorError: if the electron density is below the floor
        CompatibilityError: if ∫(b − ρ̄_e) dx ≠ 0
    """
    check_state(state, floor)
    grid = state.grid
    E_hat = grid.real_gradient_symbol * _potential_hat(grid, state.ion_density, state.rho_e)

    h_e = _enthalpy_values(law, state.rho_e)
    d_rho, d_u = _transport(
        grid,
        rho=state.rho_e[None],
        u=state.u_e[None],
        h=h_e[None],
        coefficient=np.ones(1),
        force_hat=-E_hat[None],
    )
    return (d_rho[0], d_u[0])


def rhs(state: State, params: PlasmaParams) -> Tendency:
    """Dispatch to the right-hand side matching the state's system."""
    if isinstance(state, BepState):
        return bep_rhs(state, params)
    return uep_rhs(state, params.electron_law, params.density_floor)
