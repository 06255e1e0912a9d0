"""
Unit tests for single cases, sweeps and the acceptance report.
"""

from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

import experiments.services as services
from experiments.core.types import (
    SERIES_COLUMNS,
    SUMMARY_COLUMNS,
    UNIPOLAR_COLUMNS,
    CaseStatus,
    RateFit,
    RunRecord,
)
from experiments.exceptions import CaseFailedError, ConfigError
from experiments.services import (
    RATE_THRESHOLDS,
    LinearDecayComparison,
    acceptance_flags,
    compare_uep_decay,
    fit_sweep,
    run_case,
    run_sweep,
    run_unipolar,
    solve_uep,
)
from plasma.core.types import System
from plasma.exceptions import DensityFloorError, IntegrationError

# Tests for run_case


def test_zero_family_series_vanish(config_factory):
    """
    ε = 1 with the zero-amplitude family.

    Expected: every diagnostic except t and the masses is 0
    """
    config = config_factory(family="zero", eps_list=[1.0])

    record = run_case(1.0, config)

    assert record.status == CaseStatus.OK
    zero_columns = [c for c in SERIES_COLUMNS if c not in ("t", "mass_i", "mass_e")]
    np.testing.assert_allclose(record.series[zero_columns].to_numpy(), 0.0, atol=1e-14)
    np.testing.assert_allclose(record.series["mass_i"], 2 * np.pi, rtol=1e-14)


@pytest.mark.parametrize("eps", [0.05, 0.5])
def test_equilibrium_family_energy_vanishes(config_factory, eps):
    """Expected: 𝓔(t) ≡ 0 for any ε"""
    config = config_factory(family="zero", eps_list=[eps])

    record = run_case(eps, config)

    assert np.all(np.abs(record.series["E_total"]) < 1e-14)
    assert record.summary["E_ratio"] == 0.0


def test_case_series_layout(small_config):
    """One row per sample, columns in the documented order, residuals 0 on the first row."""
    record = run_case(0.2, small_config)

    assert tuple(record.series.columns) == SERIES_COLUMNS
    np.testing.assert_allclose(record.series["t"], [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], atol=1e-12)
    first = record.series.iloc[0]
    assert first["stream_ion"] == first["stream_electron"] == first["entropy_residual"] == 0.0
    assert np.all(np.isfinite(record.series.to_numpy()))


def test_case_keeps_bep_trajectory(small_config):
    """The record carries the sampled bipolar states behind its series."""
    record = run_case(0.2, small_config)

    assert record.trajectory.system == System.BEP
    np.testing.assert_allclose(record.trajectory.times, record.series["t"], atol=1e-12)


def test_case_starts_well_prepared(small_config):
    """
    Well-prepared data at t = 0.

    Expected: 𝓝_e = w_e = 0 and ‖𝓕‖ small, with the cond2 bound holding
    """
    record = run_case(0.2, small_config)

    first = record.series.iloc[0]
    assert first["err_N_e"] == 0.0
    assert first["err_w_e"] == 0.0
    assert first["err_F"] <= 0.2**2 * 2 * np.pi
    assert record.cond2.holds


def test_summary_suprema_are_sample_maxima(small_config):
    record = run_case(0.2, small_config)

    for column in SUMMARY_COLUMNS:
        assert record.summary[f"sup_{column}"] == record.series[column].max()
        assert record.summary[f"sup_{column}"] >= record.series[column].iloc[-1]


def test_case_conserves_mass_and_charge(small_config):
    """Expected: relative mass drift and charge below 1e-12"""
    record = run_case(0.1, small_config)

    assert record.summary["mass_drift_i"] < 1e-12
    assert record.summary["mass_drift_e"] < 1e-12
    assert record.summary["max_charge"] < 1e-12


def test_ion_velocity_stays_small(small_config):
    """Expected: sup‖u_i‖_{s−1} ≤ 2ε²‖b_i‖_{s−1}"""
    record = run_case(0.2, small_config)

    assert record.summary["sup_u_i_norm"] <= record.summary["ion_velocity_bound"]


def test_cached_limit_changes_nothing(small_config):
    """A shared UEP run gives bit-identical records to a fresh one."""
    cached = run_case(0.2, small_config, solve_uep(small_config))
    fresh = run_case(0.2, small_config)

    pd.testing.assert_frame_equal(cached.series, fresh.series, check_exact=True)
    assert cached.summary == fresh.summary


def test_case_failure_carries_eps_and_time(small_config, monkeypatch):
    """Expected: CaseFailedError with ε and the time of the solver failure"""
    uep_run = solve_uep(small_config)

    def failing_integrate(state, params, policy):
        raise IntegrationError(0.3, DensityFloorError("ion", 0.2, 0.25, 0.3))

    monkeypatch.setattr(services, "integrate", failing_integrate)

    with pytest.raises(CaseFailedError) as excinfo:
        run_case(0.2, small_config, uep_run)

    assert excinfo.value.eps == 0.2
    assert excinfo.value.time == 0.3


# Tests for run_unipolar


def test_unipolar_over_uniform_background_is_the_sweep_limit(small_config):
    """β = 0: the same trajectory as the sweep's unipolar limit."""
    run = run_unipolar(small_config)
    uep_run = solve_uep(small_config)

    np.testing.assert_array_equal(
        run.trajectory.final.state.rho_e, uep_run.trajectory.final.state.rho_e
    )
    assert run.trajectory.final.state.background is None
    np.testing.assert_allclose(
        run.series["charge_imbalance"] + run.series["u_e_norm"], uep_run.decay, rtol=1e-12
    )


def test_unipolar_series_layout(config_factory):
    run = run_unipolar(config_factory(background_amplitude=0.2))

    assert tuple(run.series.columns) == UNIPOLAR_COLUMNS
    np.testing.assert_allclose(run.series["t"], [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], atol=1e-12)


def test_doped_run_keeps_background_and_mass(config_factory):
    """Expected: every sample carries b, ∫ρ̄_e = 2π, entropy nonincreasing"""
    config = config_factory(background_amplitude=0.3)

    run = run_unipolar(config)

    for sample in run.trajectory:
        np.testing.assert_array_equal(sample.state.background, config.background())
    np.testing.assert_allclose(run.series["mass_e"], 2 * np.pi, rtol=1e-12)
    assert np.all(np.diff(run.series["entropy_E"]) <= 1e-10)


def test_background_drives_electrons_from_rest(config_factory):
    """
    Zero family: ρ̄_e = b, ū_e = 0 at t = 0.

    Expected: at rest for b ≡ 1; for b = 1 + 0.3·cos x₁ the pressure gradient sets the
    electrons moving and charge separates
    """
    uniform = run_unipolar(config_factory(family="zero"))
    doped = run_unipolar(config_factory(family="zero", background_amplitude=0.3))

    assert uniform.series["u_e_norm"].max() < 1e-14
    assert doped.series["charge_imbalance"].iloc[0] < 1e-14
    assert doped.series["u_e_norm"].iloc[-1] > 1e-3
    assert doped.series["charge_imbalance"].iloc[-1] > 1e-4


def test_unipolar_failure_is_wrapped(small_config, monkeypatch):
    def failing_integrate(state, params, policy):
        raise IntegrationError(0.3, DensityFloorError("electron", 0.2, 0.25, 0.3))

    monkeypatch.setattr(services, "integrate", failing_integrate)

    with pytest.raises(CaseFailedError) as excinfo:
        run_unipolar(small_config)

    assert np.isnan(excinfo.value.eps)
    assert excinfo.value.time == 0.3


# Tests for run_sweep


def test_sweep_needs_three_eps(config_factory):
    """Expected: ConfigError"""
    with pytest.raises(ConfigError):
        run_sweep(config_factory(eps_list=[0.4, 0.2]))


def test_sweep_zero_family_skips_fits(config_factory):
    """Expected: no fits, every quantity skipped with the all-zero flag"""
    result = run_sweep(config_factory(family="zero"))

    assert result.fits == {}
    assert set(result.report["skipped_fits"].values()) == {"all_zero"}
    assert result.report["all_zero"]
    assert not result.partial


def test_sweep_records_and_report(small_config):
    result = run_sweep(small_config)

    assert [r.eps for r in result.records] == [0.4, 0.2, 0.1]
    assert set(result.fits) == set(RATE_THRESHOLDS)
    assert result.report["flags"]["conservation"]
    assert result.report["flags"]["ion_velocity_smallness"]
    assert not result.report["partial"]
    assert [case["status"] for case in result.report["cases"]] == ["ok", "ok", "ok"]
    assert all(r.trajectory is None for r in result.records)


def test_sweep_ion_velocity_rate(small_config):
    """u_i = O(ε²): the fitted slope of sup‖u_i‖ is at least 1.8."""
    result = run_sweep(small_config)

    assert result.fits["sup_u_i_norm"].slope >= 1.8


def test_sweep_parallel_matches_serial(config_factory):
    serial = run_sweep(config_factory(workers=1))
    parallel = run_sweep(config_factory(workers=2))

    for a, b in zip(serial.records, parallel.records):
        pd.testing.assert_frame_equal(a.series, b.series, check_exact=True)


def test_sweep_partial_on_failed_case(small_config, monkeypatch):
    """One failing ε marks the sweep partial and leaves too few cases to fit."""
    real_run_case = services.run_case

    def flaky_run_case(eps, config, uep_run=None):
        if eps == 0.2:
            raise CaseFailedError(eps, 0.1, RuntimeError("density floor"))
        return real_run_case(eps, config, uep_run)

    monkeypatch.setattr(services, "run_case", flaky_run_case)

    result = run_sweep(small_config)

    assert result.partial
    assert result.report["flags"]["partial"]
    failed = [r for r in result.records if not r.ok]
    assert [r.eps for r in failed] == [0.2]
    assert failed[0].failed_at == 0.1
    assert set(result.report["skipped_fits"].values()) == {"insufficient_cases"}


# Tests for fit_sweep and acceptance_flags


def _record(eps, **summary):
    values = {
        "mass_drift_i": 0.0,
        "mass_drift_e": 0.0,
        "max_charge": 0.0,
        "E_ratio": 1.0,
        "sup_u_i_norm": eps**2,
        "ion_velocity_bound": 2 * eps**2,
    }
    values.update({q: eps for q in RATE_THRESHOLDS})
    values.update(summary)
    return RunRecord(eps=eps, status=CaseStatus.OK, summary=values)


def test_fit_sweep_log_domain_skip():
    records = [_record(0.4), _record(0.2, sup_err_F=0.0), _record(0.1)]

    fits, skipped = fit_sweep(records)

    assert skipped == {"sup_err_F": "log_domain"}
    assert fits["sup_err_N_e"].slope == pytest.approx(1.0)


def test_uniform_bound_flag_trend():
    """Expected: fails when the smallest-ε ratio exceeds twice the largest-ε ratio"""
    records = [_record(0.4, E_ratio=1.1), _record(0.2, E_ratio=1.5), _record(0.1, E_ratio=2.5)]

    flags = acceptance_flags(records, {}, None)

    assert flags["uniform_bound"] is False
    assert flags["rates"] is None
    assert flags["uep_decay"] is None


def test_uniform_bound_flag_cap():
    records = [_record(0.4, E_ratio=11.0), _record(0.2, E_ratio=11.0), _record(0.1)]

    assert acceptance_flags(records, {}, None)["uniform_bound"] is False


def test_rate_flags_use_thresholds():
    records = [_record(e) for e in (0.4, 0.2, 0.1)]
    fits = {q: RateFit(slope=4.0, intercept=0.0, r_squared=1.0) for q in RATE_THRESHOLDS}
    decay = RateFit(slope=-0.3, intercept=0.0, r_squared=0.99)

    flags = acceptance_flags(records, fits, decay)

    assert flags["rates"] is True
    assert flags["uep_decay"] is True
    assert flags["conservation"] is True
    assert flags["ion_velocity_smallness"] is True

    fits["sup_u_i_norm"] = RateFit(slope=1.5, intercept=0.0, r_squared=1.0)
    assert acceptance_flags(records, fits, decay)["rates"] is False


def test_flags_without_successful_cases():
    flags = acceptance_flags([RunRecord.failed(0.1, RuntimeError("x"))], {}, None)

    assert flags["partial"] is True
    assert flags["conservation"] is None


def test_uep_decay_linear_flag():
    records = [_record(e) for e in (0.4, 0.2, 0.1)]
    decay = RateFit(slope=-0.513, intercept=0.0, r_squared=0.948)
    linear_fit = RateFit(slope=-0.51, intercept=0.0, r_squared=0.95)

    close = LinearDecayComparison(linear_fit, envelope_rate=0.5, max_relative_deviation=0.05)
    far = LinearDecayComparison(linear_fit, envelope_rate=0.5, max_relative_deviation=0.3)
    flags = acceptance_flags(records, {}, decay, close)

    assert flags["uep_decay"] is False
    assert flags["uep_decay_linear"] is True
    assert acceptance_flags(records, {}, decay, far)["uep_decay_linear"] is False
    assert acceptance_flags(records, {}, None, close)["uep_decay_linear"] is None


def test_compare_uep_decay_against_exact_linear_series():
    """A run that is exactly its linearization deviates by 0 and fits the same line."""
    times = np.linspace(0.0, 8.0, 17)
    linear = np.exp(-0.5 * times) * (1.2 + 0.3 * np.cos(3.3 * times))
    run = SimpleNamespace(
        trajectory=SimpleNamespace(times=times),
        decay=linear.copy(),
        linear_decay=linear,
        envelope_rate=0.5,
    )

    comparison = compare_uep_decay(run, (2.0, 8.0))

    assert comparison.max_relative_deviation == 0.0
    assert comparison.envelope_rate == 0.5
    assert comparison.fit.slope == pytest.approx(-0.5, abs=0.1)
    assert comparison.to_dict()["fit"]["quantity"] == "uep_decay_linear"


def test_compare_uep_decay_skips_vanishing_series():
    times = np.linspace(0.0, 8.0, 17)
    run = SimpleNamespace(
        trajectory=SimpleNamespace(times=times),
        decay=np.zeros(17),
        linear_decay=np.zeros(17),
        envelope_rate=0.0,
    )

    assert compare_uep_decay(run, (2.0, 8.0)) is None


def test_sweep_report_lists_failed_flags(small_config):
    report = run_sweep(small_config).report

    assert "partial" not in report["failed_flags"]
    assert all(report["flags"][name] is False for name in report["failed_flags"])
