"""
Dataclasses for ε-sweeps: the sweep configuration, per-case records and rate fits.

The harness never touches files here; serialization lives in experiments.csv_service and
experiments.yaml_service.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from limits.core.types import Cond2Report, WellPreparedFamily
from plasma.core.types import (
    DENSITY_FLOOR,
    DT_MAX,
    PlasmaParams,
    PressureLaw,
    StepPolicy,
    Trajectory,
)
from spectral.core.grid import TorusGrid, make_grid

from ..exceptions import ConfigError

MIN_RATE_POINTS = 3
MAX_BACKGROUND_AMPLITUDE = 0.5

# Desk-scale defaults; every key is also a config-file key.
DESK_DEFAULTS: dict[str, Any] = {
    "eps_list": [0.4, 0.2, 0.1, 0.05],
    "d": 1,
    "n": 128,
    "s": 2,
    "gamma_i": 2.0,
    "gamma_e": 2.0,
    "K_i": 1.0,
    "K_e": 1.0,
    "t_end": 8.0,
    "sample_interval": 0.05,
    "cfl": 0.4,
    "dt_max": DT_MAX,
    "delta0": 0.05,
    "family": "default",
    "background_amplitude": 0.0,
    "density_floor": DENSITY_FLOOR,
    "workers": 1,
    "output_dir": "output",
    "emit_plots": False,
    "label": "sweep",
}

FAMILIES = ("default", "zero")

# One row per sample, in this order.
SERIES_COLUMNS = (
    "t",
    "E_total",
    "D_dissip",
    "entropy_E",
    "entropy_D",
    "mass_i",
    "mass_e",
    "charge",
    "a0_energy",
    "w_l2",
    "laplace_phi",
    "error_dissipation",
    "err_N_i",
    "err_N_e",
    "err_w_i",
    "err_w_e",
    "err_F",
    "u_i_norm",
    "stream_ion",
    "stream_electron",
    "entropy_residual",
    "div_ubar",
    "uep_decay",
)

# One row per sample of a unipolar run over the background b.
UNIPOLAR_COLUMNS = (
    "t",
    "charge_imbalance",
    "u_e_norm",
    "entropy_E",
    "entropy_D",
    "mass_e",
)

# Columns reduced to suprema and time integrals in the case summary.
SUMMARY_COLUMNS = (
    "E_total",
    "error_dissipation",
    "err_N_i",
    "err_N_e",
    "err_w_i",
    "err_w_e",
    "err_F",
    "u_i_norm",
)


class CaseStatus(str, Enum):
    """Outcome of one ε case."""

    OK = "ok"
    FAILED = "failed"


@dataclass(frozen=True, eq=False)
class SweepConfig:
    """
    Everything needed to run one case or a whole ε-sweep.

    params is a template: each case replaces its epsilon. The grid is the family's grid,
    and the Sobolev order s is the template's.

    background_amplitude β sets the ion background b = 1 + β·cos x₁ of standalone unipolar
    runs. Sweeps ignore it: their limit always runs over b ≡ 1.

    Validation:
        - at least one ε, every ε in (0, 1]; stored distinct and in descending order
        - s > d/2 + 1
        - workers >= 1
        - 0 <= background_amplitude <= 0.5
    Rate fitting additionally needs three distinct ε (see `check_rate_sweep`).
    """

    epsilons: tuple[float, ...]
    family: WellPreparedFamily
    params: PlasmaParams
    policy: StepPolicy
    workers: int = 1
    output_dir: Path = Path(DESK_DEFAULTS["output_dir"])
    emit_plots: bool = False
    label: str = DESK_DEFAULTS["label"]
    background_amplitude: float = 0.0

    def __post_init__(self) -> None:
        epsilons = tuple(sorted({float(e) for e in self.epsilons}, reverse=True))
        if not epsilons:
            raise ValueError("At least one epsilon is required")
        for eps in epsilons:
            if not 0 < eps <= 1:
                raise ValueError(f"epsilon must lie in (0, 1]; got {eps}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1; got {self.workers}")
        if not 0 <= self.background_amplitude <= MAX_BACKGROUND_AMPLITUDE:
            raise ValueError(
                f"background_amplitude must lie in [0, {MAX_BACKGROUND_AMPLITUDE}]; "
                f"got {self.background_amplitude}"
            )
        self.params.check_order(self.grid.d)
        object.__setattr__(self, "epsilons", epsilons)
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @property
    def grid(self) -> TorusGrid:
        return self.family.grid

    @property
    def d(self) -> int:
        return self.grid.d

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def s(self) -> int:
        return self.params.sobolev_order

    def background(self) -> np.ndarray | None:
        """b = 1 + β·cos x₁ on the grid, or None for the uniform background."""
        if self.background_amplitude == 0:
            return None
        x1 = self.grid.coordinates()[0]
        return 1 + self.background_amplitude * np.cos(x1)

    def check_rate_sweep(self) -> None:
        """Raise ConfigError unless there are enough distinct ε for a log-log fit."""
        if len(self.epsilons) < MIN_RATE_POINTS:
            raise ConfigError(
                [
                    f"A rate sweep needs at least {MIN_RATE_POINTS} distinct epsilon values; "
                    f"got {list(self.epsilons)}"
                ]
            )

    @classmethod
    def from_options(cls, options: dict[str, Any]) -> SweepConfig:
        """
        Build a configuration from flat option values layered over DESK_DEFAULTS.

        A single "eps" option replaces "eps_list".

        Raises:
            ConfigError: listing every invalid value
        """
        values = {**DESK_DEFAULTS, **{k: v for k, v in options.items() if v is not None}}
        if options.get("eps") is not None:
            values["eps_list"] = [options["eps"]]
        values.pop("eps", None)

        errors: list[str] = []
        if values["family"] not in FAMILIES:
            errors.append(f"family must be one of {FAMILIES}; got {values['family']!r}")
        try:
            grid = make_grid(int(values["d"]), int(values["n"]))
        except Exception as e:
            errors.append(str(e))
            grid = None
        if errors:
            raise ConfigError(errors)

        try:
            if values["family"] == "zero":
                family = WellPreparedFamily.zero(grid)
            else:
                family = WellPreparedFamily.default(grid, float(values["delta0"]))
            params = PlasmaParams(
                epsilon=1.0,
                ion_law=PressureLaw(K=float(values["K_i"]), gamma=float(values["gamma_i"])),
                electron_law=PressureLaw(K=float(values["K_e"]), gamma=float(values["gamma_e"])),
                sobolev_order=int(values["s"]),
                density_floor=float(values["density_floor"]),
            )
            policy = StepPolicy(
                t_end=float(values["t_end"]),
                sample_interval=float(values["sample_interval"]),
                cfl_number=float(values["cfl"]),
                dt_max=float(values["dt_max"]),
            )
            return cls(
                epsilons=tuple(float(e) for e in values["eps_list"]),
                family=family,
                params=params,
                policy=policy,
                workers=int(values["workers"]),
                output_dir=Path(values["output_dir"]),
                emit_plots=bool(values["emit_plots"]),
                label=str(values["label"]),
                background_amplitude=float(values["background_amplitude"]),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError([str(e)]) from e

    def to_options(self) -> dict[str, Any]:
        """Flat option values that rebuild this configuration through `from_options`."""
        return {
            "eps_list": list(self.epsilons),
            "d": self.d,
            "n": self.n,
            "s": self.s,
            "gamma_i": self.params.ion_law.gamma,
            "gamma_e": self.params.electron_law.gamma,
            "K_i": self.params.ion_law.K,
            "K_e": self.params.electron_law.K,
            "t_end": self.policy.t_end,
            "sample_interval": self.policy.sample_interval,
            "cfl": self.policy.cfl_number,
            "dt_max": self.policy.dt_max,
            "delta0": self.family.delta0,
            "family": "zero" if self.family.is_zero else "default",
            "density_floor": self.params.density_floor,
            "workers": self.workers,
            "output_dir": str(self.output_dir),
            "emit_plots": self.emit_plots,
            "label": self.label,
            "background_amplitude": self.background_amplitude,
        }


@dataclass(frozen=True, eq=False)
class RunRecord:
    """
    Result of one ε case.

    series has one row per sample with columns SERIES_COLUMNS; summary holds the suprema
    (sup_*), trapezoidal time integrals (int_*) and integrals of squares (int_sq_*) of
    SUMMARY_COLUMNS together with conservation and bound diagnostics. A failed case keeps
    an empty series and the failure message.

    trajectory holds the sampled bipolar states of a single run. Sweeps drop it before
    records leave the worker processes.
    """

    eps: float
    status: CaseStatus
    series: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=SERIES_COLUMNS))
    summary: dict[str, float] = field(default_factory=dict)
    error: str | None = None
    failed_at: float | None = None
    cond2: Cond2Report | None = None
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == CaseStatus.OK

    @classmethod
    def failed(cls, eps: float, error: Exception, failed_at: float | None = None) -> RunRecord:
        return cls(eps=eps, status=CaseStatus.FAILED, error=str(error), failed_at=failed_at)


@dataclass(frozen=True, slots=True)
class RateFit:
    """
    Least-squares line log(value) = slope·log(ε) + intercept.

    Validation:
        - 0 <= r_squared <= 1
    """

    slope: float
    intercept: float
    r_squared: float
    quantity: str = ""
    n_points: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.r_squared <= 1:
            raise ValueError(f"r_squared must lie in [0, 1]; got {self.r_squared}")

    def to_dict(self) -> dict[str, float | int | str]:
        return {
            "quantity": self.quantity,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Records in descending ε, the rate fits by quantity, and the assembled report."""

    records: tuple[RunRecord, ...]
    fits: dict[str, RateFit]
    report: dict[str, Any]

    @property
    def partial(self) -> bool:
        return any(not record.ok for record in self.records)

    @property
    def ok_records(self) -> list[RunRecord]:
        return [record for record in self.records if record.ok]
