"""
File output for experiment runs.

Provides RunExporter for per-case CSV series and JSON summaries, and a small field
archive format for trajectories and profile series:

    <stem>.bin   every field concatenated in sidecar order, each a C-order (row-major)
                 array of little-endian float64 values
    <stem>.json  sidecar: grid metadata, sample times, and name/shape/offset per field

Vector fields keep the component axis first, after the leading time axis.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from experiments.core.types import SERIES_COLUMNS, UNIPOLAR_COLUMNS, RunRecord, SweepResult
from limits.core.types import ProfileSeries
from plasma.core.timestep import make_sample
from plasma.core.types import BepState, System, Trajectory, UepState
from spectral.core.grid import TorusGrid

logger = logging.getLogger(__name__)

ARCHIVE_FORMAT = "ion-mass-limit/fields"
ARCHIVE_VERSION = 1
DTYPE = "<f8"


def _json_ready(value: Any) -> Any:
    """Replace non-finite floats and numpy scalars with JSON values (NaN and inf become null)."""
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(payload: dict[str, Any], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_json_ready(payload), indent=2, allow_nan=False) + "\n")
    return path


def eps_tag(eps: float) -> str:
    return f"eps_{eps:g}"


class RunExporter:
    """Write case series and summaries under one output directory."""

    def __init__(self, output_dir: str | Path):
        """
        Initialize exporter with its target directory.

        Args:
            output_dir: directory receiving every file; created on first write
        """
        self.output_dir = Path(output_dir)
        self.results = {
            "written": [],  # [path, ...]
            "skipped": [],  # [(eps, reason), ...]
        }

    def export_record(self, record: RunRecord) -> Path | None:
        """
        Write the case's series as <eps tag>.csv with a header row of column names.

        Failed cases have no series and are skipped.
        """
        if not record.ok:
            self.results["skipped"].append((record.eps, record.error or "failed"))
            return None
        path = self.output_dir / f"{eps_tag(record.eps)}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        record.series.to_csv(path, index=False, columns=list(SERIES_COLUMNS), float_format="%.17g")
        self.results["written"].append(path)
        return path

    def export_unipolar_series(self, series: pd.DataFrame) -> Path:
        """Write a standalone unipolar run's series as uep_series.csv."""
        path = self.output_dir / "uep_series.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        series.to_csv(path, index=False, columns=list(UNIPOLAR_COLUMNS), float_format="%.17g")
        self.results["written"].append(path)
        return path

    def export_case_summary(self, record: RunRecord) -> Path:
        payload = {
            "eps": record.eps,
            "status": record.status.value,
            "error": record.error,
            "failed_at": record.failed_at,
            "summary": record.summary,
            "cond2": None if record.cond2 is None else _cond2_dict(record.cond2),
        }
        path = write_json(payload, self.output_dir / f"{eps_tag(record.eps)}_summary.json")
        self.results["written"].append(path)
        return path

    def export_sweep(self, result: SweepResult) -> dict:
        """
        Write every case CSV and the sweep report as summary.json.

        Returns:
            Dictionary with results structure containing written paths and skipped cases
        """
        for record in result.records:
            self.export_record(record)
        self.results["written"].append(write_json(result.report, self.output_dir / "summary.json"))
        logger.info("Wrote %d files to %s", len(self.results["written"]), self.output_dir)
        return self.results


def _cond2_dict(report) -> dict[str, Any]:
    return {
        "C2": report.C2,
        "electron_density": report.electron_density,
        "electron_velocity": report.electron_velocity,
        "ion_density": report.ion_density,
        "ion_velocity": report.ion_velocity,
        "holds": report.holds,
    }


def read_series_csv(path: str | Path) -> pd.DataFrame:
    """
    Read a case CSV back.

    Raises:
        ValueError: if the header does not match the documented column order
    """
    df = pd.read_csv(path, float_precision="round_trip")
    if tuple(df.columns) != SERIES_COLUMNS:
        raise ValueError(f"Unexpected columns in {path}: {list(df.columns)}")
    return df


# Field archives


def _archive_paths(stem: str | Path) -> tuple[Path, Path]:
    # stems such as "eps_0.1_bep" contain dots, so suffixes are appended, never replaced
    stem = Path(stem)
    return stem.parent / f"{stem.name}.bin", stem.parent / f"{stem.name}.json"


def write_field_archive(
    stem: str | Path,
    grid: TorusGrid,
    times: np.ndarray,
    fields: dict[str, np.ndarray],
    kind: str,
) -> tuple[Path, Path]:
    """
    Write named arrays to <stem>.bin with a <stem>.json sidecar.

    Returns:
        (binary path, sidecar path)
    """
    bin_path, json_path = _archive_paths(stem)
    bin_path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    offset = 0
    with bin_path.open("wb") as handle:
        for name, array in fields.items():
            data = np.ascontiguousarray(array, dtype=DTYPE)
            handle.write(data.tobytes(order="C"))
            entries.append({"name": name, "shape": list(data.shape), "offset": offset})
            offset += data.nbytes
    sidecar = {
        "format": ARCHIVE_FORMAT,
        "version": ARCHIVE_VERSION,
        "kind": kind,
        "dtype": DTYPE,
        "order": "C",
        "grid": {"d": grid.d, "n": grid.n, "axis_length": grid.axis_length},
        "times": [float(t) for t in times],
        "fields": entries,
        "total_bytes": offset,
    }
    write_json(sidecar, json_path)
    logger.debug("Wrote %s archive %s (%d bytes)", kind, bin_path, offset)
    return bin_path, json_path


def read_field_archive(stem: str | Path) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """
    Read an archive written by `write_field_archive`.

    Returns:
        (sidecar metadata, arrays by name)

    Raises:
        ValueError: if the sidecar is not a field archive or the binary size disagrees
    """
    bin_path, json_path = _archive_paths(stem)
    meta = json.loads(json_path.read_text())
    if meta.get("format") != ARCHIVE_FORMAT or meta.get("dtype") != DTYPE:
        raise ValueError(f"{json_path} is not a {ARCHIVE_FORMAT} sidecar")
    raw = bin_path.read_bytes()
    if len(raw) != meta["total_bytes"]:
        raise ValueError(
            f"{bin_path} holds {len(raw)} bytes; sidecar expects {meta['total_bytes']}"
        )
    arrays = {}
    for entry in meta["fields"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape))
        arrays[entry["name"]] = np.frombuffer(
            raw, dtype=DTYPE, count=count, offset=entry["offset"]
        ).reshape(shape)
    return meta, arrays


def _grid_from(meta: dict[str, Any]) -> TorusGrid:
    layout = meta["grid"]
    return TorusGrid(
        d=int(layout["d"]), n=int(layout["n"]), axis_length=float(layout["axis_length"])
    )


def export_trajectory(traj: Trajectory, stem: str | Path) -> tuple[Path, Path]:
    """Store the state fields of every sample; φ and E are recomputed on import."""
    states = traj.states
    if traj.system == System.BEP:
        names = ("rho_i", "u_i", "rho_e", "u_e")
    else:
        names = ("rho_e", "u_e")
    fields = {name: np.stack([getattr(state, name) for state in states]) for name in names}
    if traj.system == System.UEP and states[0].background is not None:
        fields["background"] = states[0].background
    return write_field_archive(stem, traj.grid, traj.times, fields, traj.system.value)


def import_trajectory(stem: str | Path) -> Trajectory:
    """
    Rebuild a trajectory from an archive.

    Raises:
        ValueError: if the archive holds profiles rather than a trajectory
    """
    meta, arrays = read_field_archive(stem)
    grid = _grid_from(meta)
    system = System(meta["kind"]) if meta["kind"] in {s.value for s in System} else None
    if system is None:
        raise ValueError(f"Archive {stem} holds {meta['kind']!r}, not a trajectory")
    samples = []
    for k, t in enumerate(meta["times"]):
        if system == System.BEP:
            state = BepState(
                grid,
                arrays["rho_i"][k].copy(),
                arrays["u_i"][k].copy(),
                arrays["rho_e"][k].copy(),
                arrays["u_e"][k].copy(),
            )
        else:
            background = arrays.get("background")
            state = UepState(
                grid,
                arrays["rho_e"][k].copy(),
                arrays["u_e"][k].copy(),
                None if background is None else background.copy(),
            )
        samples.append(make_sample(float(t), state))
    return Trajectory(system, tuple(samples))


def export_profiles(series: ProfileSeries, stem: str | Path) -> tuple[Path, Path]:
    fields = {"u_bar_i": series.u_bar_i, "rho_bar_i1": series.rho_bar_i1}
    return write_field_archive(stem, series.grid, series.times, fields, "profiles")


def import_profiles(stem: str | Path) -> ProfileSeries:
    meta, arrays = read_field_archive(stem)
    if meta["kind"] != "profiles":
        raise ValueError(f"Archive {stem} holds {meta['kind']!r}, not profiles")
    return ProfileSeries(
        grid=_grid_from(meta),
        times=np.asarray(meta["times"]),
        u_bar_i=arrays["u_bar_i"].copy(),
        rho_bar_i1=arrays["rho_bar_i1"].copy(),
    )
