"""
Lightweight dataclasses for the bipolar and unipolar Euler-Poisson models.

Fields are numpy arrays on a `spectral.core.grid.TorusGrid`; vector fields carry the
component axis first. The potential is never stored on a state: it is derived from the
densities by the Poisson equation whenever needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Union

import numpy as np

from spectral.core.grid import TorusGrid

from ..exceptions import InsufficientDataError

DENSITY_FLOOR = 0.25
DT_MAX = 0.1


class Species(str, Enum):
    """Which fluid a quantity belongs to."""

    ION = "ion"
    ELECTRON = "electron"


class System(str, Enum):
    """Which model a trajectory integrates."""

    BEP = "bep"
    UEP = "uep"


@dataclass(frozen=True, slots=True)
class PressureLaw:
    """
    γ-law pressure p(ρ) = K·ρ^γ.

    Smooth and strictly increasing on ρ > 0. γ = 1 is the isothermal law.
    The matching enthalpy is normalized by h(1) = 0 (see plasma.core.equations).

    Validation:
        - K > 0
        - gamma >= 1
    """

    K: float = 1.0
    gamma: float = 2.0

    def __post_init__(self) -> None:
        if not self.K > 0:
            raise ValueError(f"Pressure coefficient K must be positive; got {self.K}")
        if not self.gamma >= 1:
            raise ValueError(f"Adiabatic exponent gamma must be >= 1; got {self.gamma}")

    @property
    def is_isothermal(self) -> bool:
        return self.gamma == 1


@dataclass(frozen=True, slots=True)
class PlasmaParams:
    """
    Every scalar entering the scaled equations.

    epsilon is m_i^{-1/2} with the electron mass fixed at 1 and charges (q_e, q_i) = (-1, 1)
    absorbed into the right-hand sides.

    Validation:
        - 0 < epsilon <= 1
        - sobolev_order >= 1 (the grid-dependent threshold s > d/2 + 1 is checked by
          `check_order` before integrating)
    """

    epsilon: float
    ion_law: PressureLaw = field(default_factory=PressureLaw)
    electron_law: PressureLaw = field(default_factory=PressureLaw)
    sobolev_order: int = 2
    density_floor: float = DENSITY_FLOOR

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1]; got {self.epsilon}")
        if self.sobolev_order < 1:
            raise ValueError(f"sobolev_order must be at least 1; got {self.sobolev_order}")
        if not 0 < self.density_floor < 1:
            raise ValueError(f"density_floor must lie in (0, 1); got {self.density_floor}")

    @classmethod
    def from_ion_mass(cls, ion_mass: float, **kwargs) -> PlasmaParams:
        """Scaled parameters for an ion-to-electron mass ratio m_i >= 1."""
        if not ion_mass >= 1:
            raise ValueError(f"ion mass must be >= 1 (electron mass is 1); got {ion_mass}")
        return cls(epsilon=float(ion_mass) ** -0.5, **kwargs)

    @property
    def ion_mass(self) -> float:
        return self.epsilon**-2

    def with_epsilon(self, epsilon: float) -> PlasmaParams:
        return replace(self, epsilon=epsilon)

    def check_order(self, d: int) -> None:
        """Raise ValueError unless s > d/2 + 1."""
        if not self.sobolev_order > d / 2 + 1:
            raise ValueError(
                f"sobolev_order={self.sobolev_order} must exceed d/2 + 1 = {d / 2 + 1} for d={d}"
            )


@dataclass(frozen=True, eq=False)
class BepState:
    """
    Two-fluid state (ρ_i, u_i, ρ_e, u_e) at one time.

    Invariants checked by the model (see `plasma.core.equations.check_state`):
        - min ρ_ν above the density floor
        - ∫(ρ_i − ρ_e) dx = 0
    """

    grid: TorusGrid
    rho_i: np.ndarray
    u_i: np.ndarray
    rho_e: np.ndarray
    u_e: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho_i", self.grid.check_scalar(self.rho_i, "rho_i"))
        object.__setattr__(self, "rho_e", self.grid.check_scalar(self.rho_e, "rho_e"))
        object.__setattr__(self, "u_i", self.grid.check_vector(self.u_i, "u_i"))
        object.__setattr__(self, "u_e", self.grid.check_vector(self.u_e, "u_e"))

    system = System.BEP

    @classmethod
    def equilibrium(cls, grid: TorusGrid) -> BepState:
        return cls(grid, grid.ones(), grid.zeros(vector=True), grid.ones(), grid.zeros(vector=True))

    @property
    def fields(self) -> tuple[np.ndarray, ...]:
        return (self.rho_i, self.u_i, self.rho_e, self.u_e)

    def with_fields(self, fields: tuple[np.ndarray, ...]) -> BepState:
        rho_i, u_i, rho_e, u_e = fields
        return BepState(self.grid, rho_i, u_i, rho_e, u_e)

    def axpy(self, a: float, tendency: tuple[np.ndarray, ...]) -> BepState:
        """Return state + a·tendency."""
        return self.with_fields(tuple(f + a * t for f, t in zip(self.fields, tendency)))

    def densities(self) -> dict[Species, np.ndarray]:
        return {Species.ION: self.rho_i, Species.ELECTRON: self.rho_e}

    def max_abs_deviation(self) -> float:
        """Largest pointwise distance from the equilibrium (1, 0, 1, 0)."""
        return float(
            max(
                np.max(np.abs(self.rho_i - 1)),
                np.max(np.abs(self.rho_e - 1)),
                np.max(np.abs(self.u_i)),
                np.max(np.abs(self.u_e)),
            )
        )


@dataclass(frozen=True, eq=False)
class UepState:
    """
    Electron-only state (ρ̄_e, ū_e) over a fixed ion background.

    The background is 1 unless a field b(x) is given; either way ∫(b − ρ̄_e) dx = 0.
    """

    grid: TorusGrid
    rho_e: np.ndarray
    u_e: np.ndarray
    background: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho_e", self.grid.check_scalar(self.rho_e, "rho_e"))
        object.__setattr__(self, "u_e", self.grid.check_vector(self.u_e, "u_e"))
        if self.background is not None:
            object.__setattr__(
                self, "background", self.grid.check_scalar(self.background, "background")
            )

    system = System.UEP

    @classmethod
    def equilibrium(cls, grid: TorusGrid) -> UepState:
        return cls(grid, grid.ones(), grid.zeros(vector=True))

    @property
    def ion_density(self) -> np.ndarray:
        return self.grid.ones() if self.background is None else self.background

    @property
    def fields(self) -> tuple[np.ndarray, ...]:
        return (self.rho_e, self.u_e)

    def with_fields(self, fields: tuple[np.ndarray, ...]) -> UepState:
        rho_e, u_e = fields
        return UepState(self.grid, rho_e, u_e, self.background)

    def axpy(self, a: float, tendency: tuple[np.ndarray, ...]) -> UepState:
        return self.with_fields(tuple(f + a * t for f, t in zip(self.fields, tendency)))

    def densities(self) -> dict[Species, np.ndarray]:
        return {Species.ELECTRON: self.rho_e}

    def max_abs_deviation(self) -> float:
        return float(max(np.max(np.abs(self.rho_e - 1)), np.max(np.abs(self.u_e))))


State = Union[BepState, UepState]


@dataclass(frozen=True, slots=True)
class StepPolicy:
    """
    Step-size and sampling policy for explicit integration.

    Validation:
        - 0 < cfl_number <= 1
        - t_end >= 0
        - sample_interval > 0
        - dt_max > 0
    """

    t_end: float
    sample_interval: float
    cfl_number: float = 0.4
    dt_max: float = DT_MAX

    def __post_init__(self) -> None:
        if not 0 < self.cfl_number <= 1:
            raise ValueError(f"cfl_number must lie in (0, 1]; got {self.cfl_number}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative; got {self.t_end}")
        if not self.sample_interval > 0:
            raise ValueError(f"sample_interval must be positive; got {self.sample_interval}")
        if not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive; got {self.dt_max}")

    def sample_times(self) -> np.ndarray:
        """0, Δt, 2Δt, ... up to and including t_end."""
        count = int(np.floor(self.t_end / self.sample_interval + 1e-9))
        times = [k * self.sample_interval for k in range(count + 1)]
        if self.t_end - times[-1] > 1e-9 * self.sample_interval:
            times.append(self.t_end)
        return np.array(times)


@dataclass(frozen=True, eq=False)
class Sample:
    """One stored time level: the state plus its derived potential and field."""

    t: float
    state: State
    phi: np.ndarray
    E: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Time-ordered samples of one run.

    Times are strictly increasing and the first sample is at t = 0.
    """

    system: System
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        if not self.samples:
            raise InsufficientDataError("Trajectory has no samples", 0, 1)
        if self.samples[0].t != 0.0:
            raise ValueError(f"First sample must be at t=0; got t={self.samples[0].t}")
        times = np.array([s.t for s in self.samples])
        if np.any(np.diff(times) <= 0):
            raise ValueError("Sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> Sample:
        return self.samples[index]

    @property
    def grid(self) -> TorusGrid:
        return self.samples[0].state.grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def states(self) -> list[State]:
        return [s.state for s in self.samples]

    @property
    def final(self) -> Sample:
        return self.samples[-1]

    def interval(self, rtol: float = 1e-9) -> float:
        """
        The uniform sample spacing Δt.

        Raises:
            InsufficientDataError: fewer than 2 samples
            ValueError: if the spacing is not uniform
        """
        if len(self.samples) < 2:
            raise InsufficientDataError("Uniform spacing needs two samples", len(self.samples), 2)
        steps = np.diff(self.times)
        if np.max(np.abs(steps - steps[0])) > rtol * steps[0]:
            raise ValueError("Trajectory samples are not uniformly spaced")
        return float(steps[0])


@dataclass(frozen=True, slots=True)
class EnergyReport:
    """
    Scalar diagnostics of one BEP state.

    E_total and D_dissip are the total and dissipative energies; entropy_E and
    entropy_D are the entropy and its dissipation rate; masses and charge are the
    conserved integrals.
    """

    E_total: float
    D_dissip: float
    entropy_E: float
    entropy_D: float
    mass_i: float
    mass_e: float
    charge: float
    a0_energy: float
    w_l2: float
    laplace_phi: float
