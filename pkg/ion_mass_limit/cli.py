"""
Command-line interface: simulate | sweep | unipolar | profiles | check.

Exit codes: 0 on success, 1 when a run fails or a check does not pass (a partial sweep
counts as failed, and so does a failed acceptance flag under sweep --strict), 2 for
invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Sequence

from experiments.checks import run_check
from experiments.core.types import RunRecord, SweepConfig
from experiments.csv_service import (
    RunExporter,
    eps_tag,
    export_profiles,
    export_trajectory,
    import_trajectory,
)
from experiments.exceptions import CaseFailedError, ConfigError
from experiments.plots import write_decay_plot, write_rate_plot
from experiments.services import run_case, run_sweep, run_unipolar, solve_uep
from experiments.yaml_service import SweepConfigYAMLExporter, load_config
from ion_mass_limit import settings
from limits.core.data import well_prepared_data
from limits.core.profiles import solve_profiles
from limits.core.types import WellPreparedFamily
from plasma.core.types import System
from plasma.exceptions import PlasmaError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_SIMULATE_EPS = 0.1


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML file of options; flags override it")
    parser.add_argument("--n", type=int, help="grid points per axis (even, >= 8)")
    parser.add_argument("--d", type=int, choices=(1, 2, 3), help="torus dimension")
    parser.add_argument("--s", type=int, help="Sobolev order of the diagnostics")
    parser.add_argument("--t-end", dest="t_end", type=float, help="final time")
    parser.add_argument(
        "--sample-interval", dest="sample_interval", type=float, help="spacing of stored samples"
    )
    parser.add_argument("--cfl", type=float, help="CFL number in (0, 1]")
    parser.add_argument("--gamma-i", dest="gamma_i", type=float, help="ion adiabatic exponent")
    parser.add_argument("--gamma-e", dest="gamma_e", type=float, help="electron adiabatic exponent")
    parser.add_argument("--out", dest="output_dir", type=Path, help="output directory")
    parser.add_argument(
        "--emit-plots",
        dest="emit_plots",
        action="store_true",
        default=None,
        help="write gnuplot scripts and data files",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manage.py",
        description="Bipolar Euler-Poisson simulations and infinity-ion-mass limit sweeps",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run one epsilon case")
    simulate.add_argument("--eps", type=float, help="epsilon in (0, 1] (default 0.1)")
    _add_run_options(simulate)

    sweep = commands.add_parser("sweep", help="run an epsilon sweep and fit rates")
    sweep.add_argument(
        "--eps-list", dest="eps_list", type=float, nargs="+", help="three or more epsilons"
    )
    sweep.add_argument("--workers", type=int, help="parallel worker processes")
    sweep.add_argument(
        "--strict", action="store_true", help="exit 1 when any acceptance flag fails"
    )
    _add_run_options(sweep)

    unipolar = commands.add_parser(
        "unipolar", help="run the unipolar system alone over a doped ion background"
    )
    unipolar.add_argument(
        "--background-amplitude",
        dest="background_amplitude",
        type=float,
        help="beta in b = 1 + beta*cos(x1), within [0, 0.5] (default 0)",
    )
    _add_run_options(unipolar)

    profiles = commands.add_parser(
        "profiles", help="solve the limiting ion profiles from a stored UEP trajectory"
    )
    profiles.add_argument(
        "trajectory", type=Path, help="archive stem of the UEP trajectory (without .bin/.json)"
    )
    profiles.add_argument("--out", dest="output_dir", type=Path, help="output directory")
    profiles.add_argument("--config", type=Path, help="YAML file giving the family options")

    commands.add_parser("check", help="run the invariant suite")
    return parser


def configure_logging(verbose: bool = False) -> None:
    config = settings.LOGGING
    if verbose:
        config = {
            **config,
            "root": {**config["root"], "level": "DEBUG"},
            "loggers": {
                name: {**entry, "level": "DEBUG"} for name, entry in config["loggers"].items()
            },
        }
    logging.config.dictConfig(config)


def _settings_defaults() -> dict[str, Any]:
    return {"n": settings.DEFAULT_N, "workers": settings.WORKERS, "output_dir": settings.OUTPUT_DIR}


def _flag_options(args: argparse.Namespace, keys: Sequence[str]) -> dict[str, Any]:
    return {key: getattr(args, key, None) for key in keys}


RUN_KEYS = (
    "n",
    "d",
    "s",
    "t_end",
    "sample_interval",
    "cfl",
    "gamma_i",
    "gamma_e",
    "output_dir",
    "emit_plots",
)


def _load(args: argparse.Namespace, extra_keys: Sequence[str], **fixed: Any) -> SweepConfig:
    overrides = _flag_options(args, (*RUN_KEYS, *extra_keys)) | fixed
    return load_config(args.config, overrides, _settings_defaults())


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load(args, ("eps",))
    if len(config.epsilons) != 1:
        config = _load(args, (), eps=DEFAULT_SIMULATE_EPS)
    eps = config.epsilons[0]
    out = config.output_dir / config.label
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(SweepConfigYAMLExporter(config).export_to_yaml())

    uep_run = solve_uep(config)
    export_trajectory(uep_run.trajectory, out / "uep")
    export_profiles(uep_run.profiles, out / "profiles")
    exporter = RunExporter(out)
    try:
        record = run_case(eps, config, uep_run)
    except CaseFailedError as e:
        logger.error("%s", e)
        exporter.export_case_summary(RunRecord.failed(eps, e, e.time))
        return EXIT_FAILED

    exporter.export_record(record)
    exporter.export_case_summary(record)
    export_trajectory(record.trajectory, out / f"{eps_tag(eps)}_bep")
    if config.emit_plots:
        write_decay_plot(record, out)
    logger.info("Case eps=%g written to %s", eps, out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args, ("eps_list", "workers"))
    out = config.output_dir / config.label
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(SweepConfigYAMLExporter(config).export_to_yaml())

    result = run_sweep(config)
    RunExporter(out).export_sweep(result)
    if config.emit_plots:
        write_rate_plot(result, out)
        if result.ok_records:
            write_decay_plot(result.ok_records[-1], out)
    for quantity, fit in result.fits.items():
        logger.info("%-22s slope %6.3f  r^2 %.4f", quantity, fit.slope, fit.r_squared)
    if result.partial:
        return EXIT_FAILED
    return EXIT_FAILED if args.strict and result.report["failed_flags"] else EXIT_OK


def cmd_unipolar(args: argparse.Namespace) -> int:
    config = _load(args, ("background_amplitude",))
    out = config.output_dir / config.label
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(SweepConfigYAMLExporter(config).export_to_yaml())

    run = run_unipolar(config)
    export_trajectory(run.trajectory, out / "uep")
    RunExporter(out).export_unipolar_series(run.series)
    final = run.series.iloc[-1]
    logger.info(
        "Unipolar run written to %s: charge imbalance %.3e, velocity %.3e at t=%g",
        out,
        final["charge_imbalance"],
        final["u_e_norm"],
        final["t"],
    )
    return EXIT_OK


def cmd_profiles(args: argparse.Namespace) -> int:
    config = load_config(args.config, base=_settings_defaults())
    trajectory = import_trajectory(args.trajectory)
    if trajectory.system != System.UEP:
        raise ConfigError([f"{args.trajectory} holds a {trajectory.system.value} trajectory"])
    family = config.family
    if not family.grid.is_same(trajectory.grid):
        # the stored grid wins; the family shapes are rebuilt on it
        family = (
            WellPreparedFamily.zero(trajectory.grid)
            if family.is_zero
            else WellPreparedFamily.default(trajectory.grid, family.delta0)
        )
    _, _, prof0 = well_prepared_data(family, 1.0)
    series = solve_profiles(trajectory, prof0.u_bar_i, prof0.rho_bar_i1)
    out = args.output_dir or config.output_dir
    export_profiles(series, Path(out) / f"{Path(args.trajectory).name}_profiles")
    logger.info("Profiles for %d samples written to %s", len(series), out)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    results = run_check()
    for result in results:
        status = "ok" if result.passed else "FAILED"
        print(
            f"{result.name:<26} {status:<7} {result.value:.3e} (tol {result.tolerance:.1e}) "
            f"{result.seconds:6.2f}s {result.detail}"
        )
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "unipolar": cmd_unipolar,
    "profiles": cmd_profiles,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    configure_logging(args.verbose or settings.DEBUG)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        for message in e.errors:
            logger.error("Invalid configuration: %s", message)
        return EXIT_USAGE
    except (CaseFailedError, PlasmaError) as e:
        logger.exception("Run failed: %s", e)
        return EXIT_FAILED
    except (OSError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
