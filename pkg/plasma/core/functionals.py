"""
Scalar diagnostics of the bipolar model.

With N_ν = ρ_ν − 1 the total and dissipative energies are

    𝓔 = Σ_ν‖N_ν‖_s² + ε⁻²‖N_i‖_{s−1}² + ε⁻²‖u_i‖_s² + ‖u_e‖_s² + ‖∇φ‖_s²
    𝓓 = Σ_ν‖∇N_ν‖_{s−1}² + ε⁻²‖u_i‖_s² + ‖u_e‖_s²

and the entropy S = ∫η₀ + ½|∇φ|² with

    η₀ = ½ρ_e|u_e|² + H_e(ρ_e) + ρ_i|u_i|²/(2ε²) + H_i(ρ_i)

dissipates at the rate D = ∫ρ_e|u_e|² + ε⁻²ρ_i|u_i|².
"""

from __future__ import annotations

import numpy as np

from spectral.core.norms import l2_inner, l2_norm_squared, multi_indices, partial
from spectral.core.norms import sobolev_norm as _norm
from spectral.core.norms import sobolev_norm_squared as _norm2
from spectral.core.operators import gradient, laplacian

from .equations import enthalpy_potential, enthalpy_prime, state_field
from .types import BepState, EnergyReport, PlasmaParams, Species, State, Trajectory


def energy_functionals(state: BepState, params: PlasmaParams) -> tuple[float, float]:
    """
    Total energy 𝓔 and dissipative energy 𝓓 of a BEP state.

    Returns:
        (E_total, D_dissip), both nonnegative and zero at equilibrium
    """
    grid = state.grid
    s = params.sobolev_order
    inv_eps2 = params.epsilon**-2
    N_i = state.rho_i - 1
    N_e = state.rho_e - 1
    _, E = state_field(state)

    velocity = inv_eps2 * _norm2(grid, state.u_i, s) + _norm2(grid, state.u_e, s)
    E_total = (
        _norm2(grid, N_i, s)
        + _norm2(grid, N_e, s)
        + inv_eps2 * _norm2(grid, N_i, s - 1)
        + velocity
        + _norm2(grid, E, s)
    )
    D_dissip = (
        _norm2(grid, gradient(grid, N_i), s - 1)
        + _norm2(grid, gradient(grid, N_e), s - 1)
        + velocity
    )
    return float(E_total), float(D_dissip)


def entropy_terms(state: State, params: PlasmaParams) -> tuple[float, float]:
    """
    Entropy S and its dissipation rate D.

    For a unipolar state only the electron terms and the field energy of φ̄ remain.

    Returns:
        (entropy_E, entropy_D)
    """
    grid = state.grid
    _, E = state_field(state)
    u_e2 = np.sum(state.u_e**2, axis=0)
    eta = 0.5 * state.rho_e * u_e2 + enthalpy_potential(
        params.electron_law, state.rho_e, Species.ELECTRON.value
    )
    dissipation = state.rho_e * u_e2
    if isinstance(state, BepState):
        inv_eps2 = params.epsilon**-2
        ion_kinetic = inv_eps2 * state.rho_i * np.sum(state.u_i**2, axis=0)
        eta = eta + 0.5 * ion_kinetic
        eta = eta + enthalpy_potential(params.ion_law, state.rho_i, Species.ION.value)
        dissipation = dissipation + ion_kinetic

    entropy_E = grid.integrate(eta) + 0.5 * l2_norm_squared(grid, E)
    entropy_D = grid.integrate(dissipation)
    return float(entropy_E), float(entropy_D)


def entropy_series(traj: Trajectory, params: PlasmaParams) -> tuple[np.ndarray, np.ndarray]:
    """Entropy and dissipation rate at every sample."""
    pairs = np.array([entropy_terms(sample.state, params) for sample in traj])
    return pairs[:, 0], pairs[:, 1]


def entropy_balance_residual(traj: Trajectory, params: PlasmaParams) -> np.ndarray:
    """
    Discrete entropy balance between consecutive samples.

    r_k = (S_{k+1} − S_k)/Δt + ½(D_k + D_{k+1}), which is O(Δt²) for an exact
    trajectory since dS/dt = −D.

    Raises:
        InsufficientDataError: fewer than 2 samples
        ValueError: if the samples are not uniformly spaced
    """
    dt = traj.interval()
    S, D = entropy_series(traj, params)
    return np.diff(S) / dt + 0.5 * (D[:-1] + D[1:])


def weighted_energy_A0(state: BepState, params: PlasmaParams, alpha_order: int) -> float:
    """
    Symmetrizer-weighted energy of all derivatives of order alpha_order.

    Σ_ν Σ_{|α|=order} ⟨∂^αU_ν, A⁰_ν ∂^αU_ν⟩ with U_ν = (N_ν, u_ν) and
    A⁰_i = diag(h_i′(ρ_i), ε⁻²ρ_i I), A⁰_e = diag(h_e′(ρ_e), ρ_e I).

    Raises:
        ValueError: if alpha_order exceeds the Sobolev order or is negative
    """
    if not 0 <= alpha_order <= params.sobolev_order:
        raise ValueError(
            f"alpha_order must lie in [0, {params.sobolev_order}]; got {alpha_order}"
        )
    grid = state.grid
    blocks = (
        (state.rho_i, state.u_i, params.ion_law, params.epsilon**-2, Species.ION),
        (state.rho_e, state.u_e, params.electron_law, 1.0, Species.ELECTRON),
    )
    total = 0.0
    for rho, u, law, velocity_weight, species in blocks:
        h_prime = enthalpy_prime(law, rho, species.value)
        for alpha in multi_indices(grid.d, alpha_order):
            dN = partial(grid, rho - 1, alpha)
            du = partial(grid, u, alpha)
            total += l2_inner(grid, dN, dN, weight=h_prime)
            total += velocity_weight * l2_inner(grid, du, du, weight=rho)
    return float(total)


def initial_smallness(state: BepState, params: PlasmaParams) -> float:
    """
    Σ_ν‖N_ν‖_s + ε⁻¹‖N_i‖_{s−1} + ‖u_e‖_s + ε⁻¹‖u_i‖_s.

    The uniform energy bound holds when this quantity is small enough.
    """
    grid = state.grid
    s = params.sobolev_order
    inv_eps = 1.0 / params.epsilon
    N_i = state.rho_i - 1
    return (
        _norm(grid, N_i, s)
        + _norm(grid, state.rho_e - 1, s)
        + inv_eps * _norm(grid, N_i, s - 1)
        + _norm(grid, state.u_e, s)
        + inv_eps * _norm(grid, state.u_i, s)
    )


def uniform_bound_rhs(state: BepState, params: PlasmaParams) -> float:
    """‖N_i‖_s² + ‖N_e‖_s² + ε⁻²‖N_i‖_{s−1}² + ‖u_e‖_s² + ε⁻²‖u_i‖_s² of the initial state."""
    grid = state.grid
    s = params.sobolev_order
    inv_eps2 = params.epsilon**-2
    N_i = state.rho_i - 1
    return float(
        _norm2(grid, N_i, s)
        + _norm2(grid, state.rho_e - 1, s)
        + inv_eps2 * _norm2(grid, N_i, s - 1)
        + _norm2(grid, state.u_e, s)
        + inv_eps2 * _norm2(grid, state.u_i, s)
    )


def w_energy(state: BepState, params: PlasmaParams) -> float:
    """‖W‖₀² for W = (N_i, ε⁻¹u_i, N_e, u_e, ∇φ)."""
    grid = state.grid
    _, E = state_field(state)
    return float(
        l2_norm_squared(grid, state.rho_i - 1)
        + l2_norm_squared(grid, state.u_i) / params.epsilon**2
        + l2_norm_squared(grid, state.rho_e - 1)
        + l2_norm_squared(grid, state.u_e)
        + l2_norm_squared(grid, E)
    )


def energy_report(state: BepState, params: PlasmaParams) -> EnergyReport:
    """All scalar diagnostics of one BEP state."""
    grid = state.grid
    s = params.sobolev_order
    E_total, D_dissip = energy_functionals(state, params)
    entropy_E, entropy_D = entropy_terms(state, params)
    phi, _ = state_field(state)
    return EnergyReport(
        E_total=E_total,
        D_dissip=D_dissip,
        entropy_E=entropy_E,
        entropy_D=entropy_D,
        mass_i=float(grid.integrate(state.rho_i)),
        mass_e=float(grid.integrate(state.rho_e)),
        charge=float(grid.integrate(state.rho_i - state.rho_e)),
        a0_energy=sum(weighted_energy_A0(state, params, k) for k in range(s + 1)),
        w_l2=w_energy(state, params),
        laplace_phi=_norm2(grid, laplacian(grid, phi), s - 1),
    )
