"""
Plot data generation for sweep results.

Writes whitespace-separated data files with a commented header and gnuplot scripts that
draw them: log-log error suprema against ε with the fitted lines, and the unipolar decay
series on a log scale. Nothing here renders images.
"""

from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from experiments.core.types import RunRecord, SweepResult

logger = logging.getLogger(__name__)

RATE_PLOT_QUANTITIES = ("sup_err_N_e", "sup_err_w_e", "sup_err_F", "sup_err_N_i", "sup_u_i_norm")


def rate_table(records: list[RunRecord], quantities=RATE_PLOT_QUANTITIES) -> pd.DataFrame:
    """One row per successful case: eps followed by each quantity, in descending ε."""
    rows = [
        {"eps": r.eps, **{q: r.summary[q] for q in quantities}}
        for r in sorted(records, key=lambda r: r.eps, reverse=True)
        if r.ok
    ]
    return pd.DataFrame(rows, columns=["eps", *quantities])


def _write_dat(df: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as handle:
        handle.write("# " + " ".join(df.columns) + "\n")
        df.to_csv(handle, sep=" ", header=False, index=False, float_format="%.17g")
    return path


def _rate_script(data_name: str, result: SweepResult, quantities) -> str:
    lines = [
        "set terminal pngcairo size 900,600",
        "set output 'rates.png'",
        "set logscale xy",
        "set xlabel 'epsilon'",
        "set ylabel 'sup_t norm'",
        "set key left top",
    ]
    plots = []
    for column, quantity in enumerate(quantities, start=2):
        plots.append(f"'{data_name}' using 1:{column} with linespoints title '{quantity}'")
        fit = result.fits.get(quantity)
        if fit is not None:
            lines.append(f"f{column}(x) = exp({fit.intercept!r}) * x**({fit.slope!r})")
            plots.append(f"f{column}(x) with lines dt 2 title 'slope {fit.slope:.2f}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_rate_plot(result: SweepResult, output_dir: str | Path) -> list[Path]:
    """
    Write rates.dat and rates.gp for the error suprema of a sweep.

    Returns:
        paths written; empty when no case succeeded
    """
    output_dir = Path(output_dir)
    table = rate_table(list(result.records))
    if table.empty:
        logger.warning("No successful cases; rate plot skipped")
        return []
    dat = _write_dat(table, output_dir / "rates.dat")
    script = output_dir / "rates.gp"
    script.write_text(_rate_script(dat.name, result, RATE_PLOT_QUANTITIES))
    return [dat, script]


def write_decay_plot(record: RunRecord, output_dir: str | Path) -> list[Path]:
    """Write uep_decay.dat and uep_decay.gp for a case's unipolar decay column."""
    output_dir = Path(output_dir)
    if not record.ok:
        return []
    table = record.series[["t", "uep_decay", "div_ubar"]]
    dat = _write_dat(table, output_dir / "uep_decay.dat")
    script = output_dir / "uep_decay.gp"
    script.write_text(
        "\n".join(
            [
                "set terminal pngcairo size 900,600",
                "set output 'uep_decay.png'",
                "set logscale y",
                "set xlabel 't'",
                f"plot '{dat.name}' using 1:2 with lines title 'uep_decay', \\",
                f"     '{dat.name}' using 1:3 with lines title 'div_ubar'",
            ]
        )
        + "\n"
    )
    return [dat, script]
