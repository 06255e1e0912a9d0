"""
Stream functions of the density errors.

For a conserved, zero-mean density error z the stream function ψ = ∇Δ⁻¹(−z) is curl-free
with div ψ = −z. Its time derivative equals a flux up to a divergence-free remainder, so
the defining equation is checked through its divergence only:

    ions:       z = 𝓝_i − ε²ρ̄_i¹,  flux ε²(ρ_i w_i + 𝓝_i ū_i + ∇ρ̄_i¹)
    electrons:  z = 𝓝_e,            flux ρ_e u_e − ρ̄_e ū_e
"""

from __future__ import annotations

import numpy as np

from plasma.core.types import Species, Trajectory, UepState
from plasma.exceptions import InsufficientDataError
from spectral.core.grid import TorusGrid
from spectral.core.norms import l2_norm_squared, sobolev_norm
from spectral.core.operators import divergence, grad_inv_laplacian, gradient

from .errors import error_vars
from .types import ErrorVars, LimitSample, ProfileState, StreamDiag


def _magnitude(grid: TorusGrid, rho: np.ndarray) -> float:
    return float(np.sqrt(l2_norm_squared(grid, rho)))


def stream_function(grid: TorusGrid, z: np.ndarray, scale: float | None = None) -> np.ndarray:
    """
    ψ = grad_inv_laplacian(−z): curl-free, zero mean, div ψ = −z.

    Raises:
        CompatibilityError: if z has a nonzero mean
    """
    return grad_inv_laplacian(grid, -z, scale=scale)


def ion_stream_argument(err: ErrorVars, prof: ProfileState, eps: float) -> np.ndarray:
    return err.N_i_err - eps**2 * prof.rho_bar_i1


def electron_stream_argument(err: ErrorVars) -> np.ndarray:
    return err.N_e_err


def _stream_and_flux(
    sample: LimitSample, eps: float, species: Species
) -> tuple[np.ndarray, np.ndarray]:
    bep, uep, prof = sample.bep, sample.uep, sample.profile
    grid = bep.grid
    err = error_vars(bep, uep, prof, eps)
    if species == Species.ION:
        z = ion_stream_argument(err, prof, eps)
        flux = eps**2 * (
            bep.rho_i * err.w_i + err.N_i_err * prof.u_bar_i + gradient(grid, prof.rho_bar_i1)
        )
        scale = _magnitude(grid, bep.rho_i)
    else:
        z = electron_stream_argument(err)
        flux = bep.rho_e * bep.u_e - uep.rho_e * uep.u_e
        scale = _magnitude(grid, bep.rho_e)
    return stream_function(grid, z, scale), flux


def stream_residual(
    before: LimitSample, after: LimitSample, eps: float, species: Species | str
) -> float:
    """
    ‖div R‖₀ for R = (ψ(t+Δt) − ψ(t))/Δt − ½(flux(t) + flux(t+Δt)).

    The divergence removes the gauge term of the stream-function equation, so the value
    is the time-discretization error of the sampled trajectory: O(Δt²).

    Args:
        before: BEP, UEP and profiles at t
        after: the same at t + Δt
        eps: ε of the BEP run
        species: ion or electron

    Raises:
        InsufficientDataError: if the two samples are not in increasing time order
    """
    species = Species(species)
    dt = after.t - before.t
    if not dt > 0:
        raise InsufficientDataError("Stream residual needs two consecutive samples", 1, 2)
    psi0, flux0 = _stream_and_flux(before, eps, species)
    psi1, flux1 = _stream_and_flux(after, eps, species)
    residual = (psi1 - psi0) / dt - 0.5 * (flux0 + flux1)
    grid = before.bep.grid
    return float(np.sqrt(l2_norm_squared(grid, divergence(grid, residual))))


def stream_diag(
    before: LimitSample, after: LimitSample, eps: float, species: Species | str
) -> StreamDiag:
    """Stream function at the later sample together with the residual over the pair."""
    psi, _ = _stream_and_flux(after, eps, Species(species))
    return StreamDiag(psi=psi, residual_div_norm=stream_residual(before, after, eps, species))


def uep_deviation(state: UepState, s: int) -> float:
    """‖ρ̄_e − 1‖_s + ‖ū_e‖_s."""
    grid = state.grid
    return sobolev_norm(grid, state.rho_e - 1, s) + sobolev_norm(grid, state.u_e, s)


def uep_decay_series(traj: Trajectory, s: int) -> np.ndarray:
    """uep_deviation at every sample of a UEP trajectory."""
    return np.array([uep_deviation(sample.state, s) for sample in traj])
