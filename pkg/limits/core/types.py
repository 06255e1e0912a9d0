"""
Dataclasses for the infinity-ion-mass limit: initial-data families, limiting profiles,
error variables and stream-function diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from plasma.core.types import BepState, UepState
from plasma.exceptions import InsufficientDataError
from spectral.core.grid import TorusGrid
from spectral.core.operators import check_mean_free

MAX_DELTA0 = 0.1
BAND_RTOL = 1e-12


def _check_band_limited(grid: TorusGrid, f: np.ndarray, name: str) -> None:
    """Raise ValueError if f has energy above the dealias cutoff."""
    f_hat = grid.forward(f)
    peak = float(np.max(np.abs(f_hat))) if f_hat.size else 0.0
    outside = float(np.max(np.abs(f_hat * ~grid.dealias_mask)))
    if outside > BAND_RTOL * max(peak, 1.0):
        raise ValueError(f"{name} has modes above the dealias cutoff n/3")


@dataclass(frozen=True, eq=False)
class WellPreparedFamily:
    """
    Shapes of a family of well-prepared initial data, independent of ε.

    The BEP data are ρ_i = 1 + ε²a_i, u_i = ε²b_i, ρ_e = 1 + δ₀a_e, u_e = δ₀v_e and the
    UEP data share the electron part (see `limits.core.data.well_prepared_data`).

    Validation:
        - a_e and a_i have zero mean (CompatibilityError)
        - every shape is band-limited below the dealias cutoff
        - 0 <= delta0 <= 0.1
    """

    grid: TorusGrid
    a_e: np.ndarray
    v_e: np.ndarray
    a_i: np.ndarray
    b_i: np.ndarray
    delta0: float = 0.05

    def __post_init__(self) -> None:
        grid = self.grid
        object.__setattr__(self, "a_e", grid.check_scalar(self.a_e, "a_e"))
        object.__setattr__(self, "a_i", grid.check_scalar(self.a_i, "a_i"))
        object.__setattr__(self, "v_e", grid.check_vector(self.v_e, "v_e"))
        object.__setattr__(self, "b_i", grid.check_vector(self.b_i, "b_i"))
        if not 0 <= self.delta0 <= MAX_DELTA0:
            raise ValueError(f"delta0 must lie in [0, {MAX_DELTA0}]; got {self.delta0}")
        check_mean_free(grid, self.a_e, scale=1.0)
        check_mean_free(grid, self.a_i, scale=1.0)
        for name in ("a_e", "v_e", "a_i", "b_i"):
            _check_band_limited(grid, getattr(self, name), name)

    @classmethod
    def zero(cls, grid: TorusGrid) -> WellPreparedFamily:
        """The zero-amplitude family: every run starts at equilibrium."""
        return cls(grid, grid.zeros(), grid.zeros(True), grid.zeros(), grid.zeros(True), 0.0)

    @classmethod
    def default(cls, grid: TorusGrid, delta0: float = 0.05) -> WellPreparedFamily:
        """a_e = sin x₁, v_e = 0.5·cos x₁, a_i = sin x₁, b_i = cos x₁, all along x₁."""
        x1 = grid.coordinates()[0]
        along_x1 = grid.zeros(vector=True)
        along_x1[0] = np.cos(x1)
        return cls(
            grid,
            a_e=np.sin(x1),
            v_e=0.5 * along_x1,
            a_i=np.sin(x1),
            b_i=along_x1.copy(),
            delta0=delta0,
        )

    @property
    def is_zero(self) -> bool:
        electron = self.delta0 == 0 or not (np.any(self.a_e) or np.any(self.v_e))
        return electron and not (np.any(self.a_i) or np.any(self.b_i))


@dataclass(frozen=True, eq=False)
class ProfileState:
    """
    Limiting ion velocity ū_i and first-order ion density profile ρ̄_i¹ at one time.

    ρ̄_i¹ has zero mean for all t.
    """

    grid: TorusGrid
    u_bar_i: np.ndarray
    rho_bar_i1: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_bar_i", self.grid.check_vector(self.u_bar_i, "u_bar_i"))
        object.__setattr__(
            self, "rho_bar_i1", self.grid.check_scalar(self.rho_bar_i1, "rho_bar_i1")
        )


@dataclass(frozen=True, eq=False)
class ProfileSeries:
    """Profiles sampled on the uniform time grid of the UEP trajectory they were solved from."""

    grid: TorusGrid
    times: np.ndarray
    u_bar_i: np.ndarray
    rho_bar_i1: np.ndarray

    def __post_init__(self) -> None:
        if len(self.times) == 0:
            raise InsufficientDataError("Profile series is empty", 0, 1)
        count = len(self.times)
        if self.u_bar_i.shape != (count,) + self.grid.vector_shape:
            raise ValueError(f"u_bar_i series has shape {self.u_bar_i.shape}")
        if self.rho_bar_i1.shape != (count,) + self.grid.shape:
            raise ValueError(f"rho_bar_i1 series has shape {self.rho_bar_i1.shape}")

    def __len__(self) -> int:
        return len(self.times)

    def at(self, index: int) -> ProfileState:
        return ProfileState(self.grid, self.u_bar_i[index], self.rho_bar_i1[index])


@dataclass(frozen=True, eq=False)
class LimitSample:
    """BEP state, UEP state and profiles at a common time."""

    t: float
    bep: BepState
    uep: UepState
    profile: ProfileState


@dataclass(frozen=True, eq=False)
class ErrorVars:
    """
    Errors between the bipolar solution and its infinity-ion-mass limit.

    N_i_err = ρ_i − 1, N_e_err = ρ_e − ρ̄_e, w_i = ε⁻²u_i − ū_i, w_e = u_e − ū_e and
    F = ∇φ − ∇φ̄. Both density errors have zero mean and div F = N_i_err − N_e_err.
    """

    grid: TorusGrid
    N_i_err: np.ndarray
    N_e_err: np.ndarray
    w_i: np.ndarray
    w_e: np.ndarray
    F: np.ndarray


@dataclass(frozen=True, eq=False)
class StreamDiag:
    """A curl-free, zero-mean stream function and the residual of its defining equation."""

    psi: np.ndarray
    residual_div_norm: float

    def __post_init__(self) -> None:
        if not self.residual_div_norm >= 0:
            raise ValueError(f"residual_div_norm must be nonnegative; got {self.residual_div_norm}")


@dataclass(frozen=True, slots=True)
class Cond2Report:
    """
    Size of the initial mismatch between BEP and its limit, measured against C₂ε.

    electron_density and electron_velocity are zero for well-prepared data;
    ion_density = ε⁻¹‖ρ_i0 − 1‖_{s−1} and ion_velocity = ε⁻¹‖u_i0‖_s.
    """

    eps: float
    C2: float
    electron_density: float
    electron_velocity: float
    ion_density: float
    ion_velocity: float

    @property
    def holds(self) -> bool:
        bound = self.C2 * self.eps * (1 + 1e-12)
        return all(
            value <= bound
            for value in (
                self.electron_density,
                self.electron_velocity,
                self.ion_density,
                self.ion_velocity,
            )
        )
