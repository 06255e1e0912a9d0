"""
Experiment service layer.

Runs single ε cases and whole sweeps: builds well-prepared data, integrates the bipolar
system per ε and the unipolar limit once, solves the limiting profiles, evaluates every
diagnostic at every sample, fits rates over ε and assembles the acceptance report.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import repeat
from typing import Any

import numpy as np
import pandas as pd

from limits.core.data import cond2_report, well_prepared_data
from limits.core.errors import error_dissipation, error_norms, error_vars, limit_samples
from limits.core.linear import envelope_rate, linear_decay_series
from limits.core.profiles import divergence_decay, solve_profiles
from limits.core.stream import stream_residual, uep_decay_series
from limits.core.types import ProfileSeries
from plasma.core.functionals import energy_report, entropy_terms
from plasma.core.timestep import integrate
from plasma.core.types import Species, Trajectory, UepState
from plasma.exceptions import InsufficientDataError, PlasmaError
from spectral.core.norms import sobolev_norm
from spectral.exceptions import SpectralError

from .core.rates import fit_decay, fit_rate, sup, trapezoid
from .core.types import (
    SERIES_COLUMNS,
    SUMMARY_COLUMNS,
    UNIPOLAR_COLUMNS,
    CaseStatus,
    RateFit,
    RunRecord,
    SweepConfig,
    SweepResult,
)
from .exceptions import CaseFailedError, LogDomainError

logger = logging.getLogger(__name__)

CONSERVATION_TOL = 1e-12
UNIFORM_BOUND_MAX = 10.0
UNIFORM_BOUND_TREND = 2.0
RATE_R2_MIN = 0.98
ION_VELOCITY_FACTOR = 2.0
UEP_DECAY_WINDOW_START = 2.0
UEP_DECAY_R2_MIN = 0.95
# agreement of the unipolar decay with its linearization over the fit window
UEP_LINEAR_RTOL = 0.25
UEP_ENVELOPE_TOL = 0.05

_ELECTRON_SIDE = ("err_N_e", "err_w_e", "err_F", "err_N_i")

# Fitted quantity -> minimum slope, or None when the fit is only reported.
RATE_THRESHOLDS: dict[str, float | None] = {
    **{f"sup_{name}": 0.9 for name in _ELECTRON_SIDE},
    "sup_u_i_norm": 1.8,
    **{f"int_sq_{name}": 1.8 for name in _ELECTRON_SIDE},
    "int_sq_u_i_norm": 3.6,
    **{f"int_{name}": None for name in _ELECTRON_SIDE},
    "int_u_i_norm": None,
}


@dataclass(frozen=True, eq=False)
class UepRun:
    """
    The ε-independent part of a sweep: the unipolar trajectory and the profiles.

    decay is uep_decay_series of the trajectory; linear_decay is the same series for the
    linearized system from the same data, and envelope_rate its slowest decay rate.
    """

    trajectory: Trajectory
    profiles: ProfileSeries
    decay: np.ndarray
    linear_decay: np.ndarray
    envelope_rate: float


@dataclass(frozen=True, slots=True)
class LinearDecayComparison:
    """
    The unipolar decay series against its linearization over the decay-fit window.

    The log-linear fit of the decay series leaves the plasma oscillation in its residual,
    so its r² can stay below UEP_DECAY_R2_MIN even when the decay is exactly the linear
    one. max_relative_deviation measures how far the run is from that linear decay.
    """

    fit: RateFit
    envelope_rate: float
    max_relative_deviation: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "fit": self.fit.to_dict(),
            "envelope_rate": self.envelope_rate,
            "max_relative_deviation": self.max_relative_deviation,
        }


def solve_uep(config: SweepConfig) -> UepRun:
    """
    Integrate the unipolar limit and solve the profiles once for a whole sweep.

    Raises:
        CaseFailedError: with ε = nan, if the unipolar run fails
    """
    _, uep0, prof0 = well_prepared_data(config.family, 1.0)
    try:
        trajectory = integrate(uep0, config.params.with_epsilon(1.0), config.policy)
        profiles = solve_profiles(trajectory, prof0.u_bar_i, prof0.rho_bar_i1)
    except (PlasmaError, SpectralError, ValueError) as e:
        raise CaseFailedError(float("nan"), getattr(e, "time", None), e) from e
    logger.info("Solved UEP limit and profiles over %d samples", len(trajectory))
    law = config.params.electron_law
    return UepRun(
        trajectory,
        profiles,
        decay=uep_decay_series(trajectory, config.s),
        linear_decay=linear_decay_series(uep0, law, trajectory.times, config.s),
        envelope_rate=envelope_rate(uep0, law),
    )


@dataclass(frozen=True, eq=False)
class UnipolarRun:
    """A standalone unipolar run over the configured background and its sample series."""

    trajectory: Trajectory
    series: pd.DataFrame


def doped_uep_data(config: SweepConfig) -> UepState:
    """
    Unipolar data over b = 1 + β·cos x₁: ρ̄_e = b + δ₀a_e, ū_e = δ₀v_e.

    The electron perturbation is the family's, so ∫(b − ρ̄_e) dx = 0 holds for every β.
    """
    _, uep0, _ = well_prepared_data(config.family, 1.0)
    background = config.background()
    if background is None:
        return uep0
    return UepState(config.grid, uep0.rho_e - 1 + background, uep0.u_e, background)


def unipolar_series(trajectory: Trajectory, config: SweepConfig) -> pd.DataFrame:
    """
    Charge imbalance ‖ρ̄_e − b‖_s, velocity norm ‖ū_e‖_s, entropy terms and electron mass
    at every sample.
    """
    params = config.params.with_epsilon(1.0)
    grid = config.grid
    s = config.s
    rows = []
    for sample in trajectory:
        state = sample.state
        entropy_E, entropy_D = entropy_terms(state, params)
        rows.append(
            {
                "t": sample.t,
                "charge_imbalance": sobolev_norm(grid, state.rho_e - state.ion_density, s),
                "u_e_norm": sobolev_norm(grid, state.u_e, s),
                "entropy_E": entropy_E,
                "entropy_D": entropy_D,
                "mass_e": float(grid.integrate(state.rho_e)),
            }
        )
    return pd.DataFrame(rows, columns=list(UNIPOLAR_COLUMNS))


def run_unipolar(config: SweepConfig) -> UnipolarRun:
    """
    Integrate the unipolar system alone over the configured background.

    Raises:
        CaseFailedError: with ε = nan, if the run fails
    """
    initial = doped_uep_data(config)
    try:
        trajectory = integrate(initial, config.params.with_epsilon(1.0), config.policy)
    except (PlasmaError, SpectralError, ValueError) as e:
        raise CaseFailedError(float("nan"), getattr(e, "time", None), e) from e
    logger.info(
        "Unipolar run over background amplitude %g: %d samples",
        config.background_amplitude,
        len(trajectory),
    )
    return UnipolarRun(trajectory, unipolar_series(trajectory, config))

def case_series(
    eps: float, bep_traj: Trajectory, uep_run: UepRun, config: SweepConfig
) -> pd.DataFrame:
    """
    Evaluate every diagnostic at every sample.

    Per-pair residuals (stream and entropy) are stored on the later sample; the first
    row holds 0 for them.

    Returns:
        DataFrame with columns SERIES_COLUMNS, one row per sample
    """
    params = config.params.with_epsilon(eps)
    s = config.s
    grid = config.grid
    samples = limit_samples(bep_traj, uep_run.trajectory, uep_run.profiles)
    div_ubar = divergence_decay(grid, uep_run.profiles.u_bar_i, s)

    rows = []
    for k, sample in enumerate(samples):
        report = energy_report(sample.bep, params)
        err = error_vars(sample.bep, sample.uep, sample.profile, eps)
        norms = error_norms(err, s - 1)
        row = {
            "t": sample.t,
            "E_total": report.E_total,
            "D_dissip": report.D_dissip,
            "entropy_E": report.entropy_E,
            "entropy_D": report.entropy_D,
            "mass_i": report.mass_i,
            "mass_e": report.mass_e,
            "charge": report.charge,
            "a0_energy": report.a0_energy,
            "w_l2": report.w_l2,
            "laplace_phi": report.laplace_phi,
            "error_dissipation": error_dissipation(err, s - 1),
            **{f"err_{name}": value for name, value in norms.items()},
            "u_i_norm": sobolev_norm(grid, sample.bep.u_i, s - 1),
            "stream_ion": 0.0,
            "stream_electron": 0.0,
            "entropy_residual": 0.0,
            "div_ubar": float(div_ubar[k]),
            "uep_decay": float(uep_run.decay[k]),
        }
        if k > 0:
            before = samples[k - 1]
            row["stream_ion"] = stream_residual(before, sample, eps, Species.ION)
            row["stream_electron"] = stream_residual(before, sample, eps, Species.ELECTRON)
            previous = rows[-1]
            dt = sample.t - before.t
            row["entropy_residual"] = (row["entropy_E"] - previous["entropy_E"]) / dt + 0.5 * (
                row["entropy_D"] + previous["entropy_D"]
            )
        rows.append(row)
    return pd.DataFrame(rows, columns=list(SERIES_COLUMNS))


def summarize(series: pd.DataFrame, eps: float, config: SweepConfig) -> dict[str, float]:
    """Suprema, time integrals and the conservation and bound diagnostics of one case."""
    times = series["t"].to_numpy()
    summary: dict[str, float] = {}
    for column in SUMMARY_COLUMNS:
        values = series[column].to_numpy()
        summary[f"sup_{column}"] = sup(values)
        summary[f"int_{column}"] = trapezoid(times, values)
        summary[f"int_sq_{column}"] = trapezoid(times, values**2)

    energy = series["E_total"].to_numpy()
    if energy[0] > 0:
        summary["E_ratio"] = float(np.max(energy) / energy[0])
    else:
        summary["E_ratio"] = 0.0 if not np.any(energy) else float("inf")
    for species in ("i", "e"):
        mass = series[f"mass_{species}"].to_numpy()
        summary[f"mass_drift_{species}"] = float(np.max(np.abs(mass - mass[0])) / abs(mass[0]))
    summary["max_charge"] = float(np.max(np.abs(series["charge"].to_numpy())))
    summary["max_entropy_residual"] = float(np.max(np.abs(series["entropy_residual"])))
    summary["max_stream_ion"] = sup(series["stream_ion"])
    summary["max_stream_electron"] = sup(series["stream_electron"])
    b_norm = sobolev_norm(config.grid, config.family.b_i, config.s - 1)
    summary["ion_velocity_bound"] = ION_VELOCITY_FACTOR * eps**2 * b_norm
    return summary


def run_case(eps: float, config: SweepConfig, uep_run: UepRun | None = None) -> RunRecord:
    """
    Run the bipolar system at one ε against the (possibly cached) unipolar limit.

    Args:
        eps: ε in (0, 1]
        config: validated sweep configuration
        uep_run: result of `solve_uep` for this config, computed here when None

    Returns:
        RunRecord with status OK

    Raises:
        CaseFailedError: if either integration fails; carries ε and the failure time
    """
    logger.info("Running case eps=%g (d=%d, n=%d, s=%d)", eps, config.d, config.n, config.s)
    if uep_run is None:
        try:
            uep_run = solve_uep(config)
        except CaseFailedError as e:
            raise CaseFailedError(eps, e.time, e.cause) from e
    bep0, _, _ = well_prepared_data(config.family, eps)
    try:
        bep_traj = integrate(bep0, config.params.with_epsilon(eps), config.policy)
        series = case_series(eps, bep_traj, uep_run, config)
    except (PlasmaError, SpectralError, ValueError) as e:
        raise CaseFailedError(eps, getattr(e, "time", None), e) from e

    summary = summarize(series, eps, config)
    try:
        decay = fit_decay(
            series["t"], series["uep_decay"], (UEP_DECAY_WINDOW_START, config.policy.t_end)
        )
        summary["uep_decay_slope"] = decay.slope
        summary["uep_decay_r_squared"] = decay.r_squared
    except (InsufficientDataError, LogDomainError):
        pass
    logger.info(
        "Finished case eps=%g: sup E=%.3e, E ratio=%.3f",
        eps,
        summary["sup_E_total"],
        summary["E_ratio"],
    )
    return RunRecord(
        eps=eps,
        status=CaseStatus.OK,
        series=series,
        summary=summary,
        cond2=cond2_report(config.family, eps, config.s),
        trajectory=bep_traj,
    )


def _run_case_safe(eps: float, config: SweepConfig, uep_run: UepRun) -> RunRecord:
    try:
        return replace(run_case(eps, config, uep_run), trajectory=None)
    except CaseFailedError as e:
        logger.exception("Case eps=%g failed", eps)
        return RunRecord.failed(eps, e, e.time)


def fit_sweep(records: list[RunRecord]) -> tuple[dict[str, RateFit], dict[str, str]]:
    """
    Fit every RATE_THRESHOLDS quantity over the successful records.

    Returns:
        (fits by quantity, skip reason by quantity). A quantity that is zero for every ε
        is skipped as "all_zero"; one with some nonpositive values as "log_domain".
    """
    fits: dict[str, RateFit] = {}
    skipped: dict[str, str] = {}
    ok = [record for record in records if record.ok]
    for quantity in RATE_THRESHOLDS:
        points = [(record.eps, record.summary[quantity]) for record in ok]
        if len(points) < 3:
            skipped[quantity] = "insufficient_cases"
        elif all(value == 0 for _, value in points):
            skipped[quantity] = "all_zero"
        else:
            try:
                fits[quantity] = fit_rate(points, quantity)
            except LogDomainError as e:
                logger.warning("Skipping rate fit of %s: %s", quantity, e)
                skipped[quantity] = "log_domain"
    return fits, skipped


def acceptance_flags(
    records: list[RunRecord],
    fits: dict[str, RateFit],
    uep_decay: RateFit | None,
    uep_linear: LinearDecayComparison | None = None,
) -> dict[str, bool | None]:
    """
    Pass/fail flags of the sweep; None when a check had nothing to evaluate.

    The uniform-bound trend compares the smallest ε against the largest. uep_decay_linear
    holds when the unipolar decay stays within UEP_LINEAR_RTOL of its linearization and
    its fitted slope within UEP_ENVELOPE_TOL of the linear envelope rate.
    """
    ok = sorted((r for r in records if r.ok), key=lambda r: r.eps, reverse=True)
    flags: dict[str, bool | None] = {"partial": len(ok) < len(records)}
    if not ok:
        return flags | {
            "conservation": None,
            "uniform_bound": None,
            "rates": None,
            "ion_velocity_smallness": None,
            "uep_decay": None,
            "uep_decay_linear": None,
        }

    flags["conservation"] = all(
        r.summary["mass_drift_i"] < CONSERVATION_TOL
        and r.summary["mass_drift_e"] < CONSERVATION_TOL
        and r.summary["max_charge"] < CONSERVATION_TOL
        for r in ok
    )
    ratios = [r.summary["E_ratio"] for r in ok]
    flags["uniform_bound"] = max(ratios) <= UNIFORM_BOUND_MAX and (
        ratios[-1] <= UNIFORM_BOUND_TREND * ratios[0] or ratios[0] == 0
    )
    graded = [q for q, threshold in RATE_THRESHOLDS.items() if threshold is not None]
    if any(q not in fits for q in graded):
        flags["rates"] = None
    else:
        flags["rates"] = all(
            fits[q].slope >= RATE_THRESHOLDS[q] and fits[q].r_squared >= RATE_R2_MIN
            for q in graded
        )
    flags["ion_velocity_smallness"] = all(
        r.summary["sup_u_i_norm"] <= r.summary["ion_velocity_bound"] * (1 + 1e-12) for r in ok
    )
    flags["uep_decay"] = (
        None
        if uep_decay is None
        else uep_decay.slope < 0 and uep_decay.r_squared >= UEP_DECAY_R2_MIN
    )
    if uep_decay is None or uep_linear is None:
        flags["uep_decay_linear"] = None
    else:
        flags["uep_decay_linear"] = (
            uep_linear.max_relative_deviation <= UEP_LINEAR_RTOL
            and abs(uep_decay.slope + uep_linear.envelope_rate) <= UEP_ENVELOPE_TOL
        )
    return flags


def compare_uep_decay(
    uep_run: UepRun, window: tuple[float, float]
) -> LinearDecayComparison | None:
    """
    Fit the linearized decay series over the window and measure the run against it.

    Returns None when the linear series cannot be fitted (too few samples, or an
    equilibrium run whose series vanishes).
    """
    times = np.asarray(uep_run.trajectory.times)
    try:
        fit = fit_decay(times, uep_run.linear_decay, window, "uep_decay_linear")
    except (InsufficientDataError, LogDomainError) as e:
        logger.warning("Skipping linear UEP decay fit: %s", e)
        return None
    start, end = window
    inside = (times >= start - 1e-12) & (times <= end + 1e-12)
    linear = uep_run.linear_decay[inside]
    deviation = float(np.max(np.abs(uep_run.decay[inside] - linear) / linear))
    logger.info(
        "UEP decay vs linearization: envelope rate %.4f, max relative deviation %.3e",
        uep_run.envelope_rate,
        deviation,
    )
    return LinearDecayComparison(fit, uep_run.envelope_rate, deviation)


def sweep_report(
    config: SweepConfig,
    records: list[RunRecord],
    fits: dict[str, RateFit],
    skipped: dict[str, str],
    uep_run: UepRun | None,
) -> dict[str, Any]:
    """
    Assemble the JSON-ready sweep report.

    failed_flags lists every acceptance flag other than partial that evaluated to False.
    """
    uep_decay = None
    uep_linear = None
    if uep_run is not None:
        window = (UEP_DECAY_WINDOW_START, config.policy.t_end)
        try:
            uep_decay = fit_decay(uep_run.trajectory.times, uep_run.decay, window, "uep_decay")
        except (InsufficientDataError, LogDomainError) as e:
            logger.warning("Skipping UEP decay fit: %s", e)
        uep_linear = compare_uep_decay(uep_run, window)

    ok = [r for r in records if r.ok]
    flags = acceptance_flags(records, fits, uep_decay, uep_linear)
    return {
        "label": config.label,
        "config": config.to_options(),
        "epsilons": list(config.epsilons),
        "partial": flags["partial"],
        "all_zero": config.family.is_zero,
        "cases": [
            {
                "eps": r.eps,
                "status": r.status.value,
                "error": r.error,
                "failed_at": r.failed_at,
                "summary": r.summary,
                "cond2_holds": None if r.cond2 is None else r.cond2.holds,
            }
            for r in records
        ],
        "fits": {
            quantity: fit.to_dict() | {"threshold": RATE_THRESHOLDS[quantity]}
            for quantity, fit in fits.items()
        },
        "skipped_fits": skipped,
        "uniform_bound_constant": max((r.summary["E_ratio"] for r in ok), default=None),
        "uep_decay": None if uep_decay is None else uep_decay.to_dict(),
        "uep_decay_linear": None if uep_linear is None else uep_linear.to_dict(),
        "flags": flags,
        "failed_flags": [
            name for name, value in flags.items() if name != "partial" and value is False
        ],
    }


def run_sweep(config: SweepConfig) -> SweepResult:
    """
    Run every ε of the configuration, fit the rates and build the report.

    The unipolar limit is solved once and shared by all cases. Cases run in a process
    pool when config.workers > 1; records come back in descending ε either way.

    Raises:
        ConfigError: fewer than three distinct ε
    """
    config.check_rate_sweep()
    logger.info("Starting sweep %r over eps=%s", config.label, list(config.epsilons))

    try:
        uep_run: UepRun | None = solve_uep(config)
    except CaseFailedError as e:
        logger.exception("UEP limit failed; every case is marked failed")
        records = [RunRecord.failed(eps, e, e.time) for eps in config.epsilons]
        uep_run = None
    else:
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as executor:
                records = list(
                    executor.map(
                        _run_case_safe, config.epsilons, repeat(config), repeat(uep_run)
                    )
                )
        else:
            records = [_run_case_safe(eps, config, uep_run) for eps in config.epsilons]

    if config.family.is_zero:
        logger.info("Zero-amplitude family: rate fits are skipped")
    fits, skipped = fit_sweep(records)
    report = sweep_report(config, records, fits, skipped, uep_run)
    if report["partial"]:
        logger.warning("Sweep %r is partial: some cases failed", config.label)
    for name in report["failed_flags"]:
        logger.warning("Sweep %r: acceptance flag %s failed", config.label, name)
    logger.info("Finished sweep %r with flags %s", config.label, report["flags"])
    return SweepResult(tuple(records), fits, report)
