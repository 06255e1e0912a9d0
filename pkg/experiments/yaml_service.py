"""
YAML import/export service for sweep configurations.

A configuration file is a flat mapping of option keys to plain values. Every key is
optional; missing keys fall back to the desk-scale defaults, and command-line flags
override file values.

YAML Format:
    eps_list: [0.4, 0.2, 0.1, 0.05]
    d: 1
    n: 128
    s: 2
    gamma_i: 2.0
    gamma_e: 2.0
    t_end: 8.0
    sample_interval: 0.05
    cfl: 0.4
    delta0: 0.05
    family: default
    background_amplitude: 0.0
    label: desk-sweep
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from experiments.core.types import DESK_DEFAULTS, SweepConfig
from experiments.exceptions import ConfigError

logger = logging.getLogger(__name__)

INT_KEYS = {"d", "n", "s", "workers"}
FLOAT_KEYS = {
    "eps",
    "gamma_i",
    "gamma_e",
    "K_i",
    "K_e",
    "t_end",
    "sample_interval",
    "cfl",
    "dt_max",
    "delta0",
    "density_floor",
    "background_amplitude",
}
BOOL_KEYS = {"emit_plots"}
STR_KEYS = {"family", "output_dir", "label"}
LIST_KEYS = {"eps_list"}
ALLOWED_KEYS = INT_KEYS | FLOAT_KEYS | BOOL_KEYS | STR_KEYS | LIST_KEYS


class SweepConfigYAMLExporter:
    """Export a sweep configuration to YAML format."""

    def __init__(self, config: SweepConfig):
        self.config = config

    def export_to_yaml(self) -> str:
        """
        Export the configuration to a YAML string.

        Importing the string back rebuilds an equivalent configuration.
        """
        return yaml.dump(
            self.config.to_options(), default_flow_style=False, sort_keys=False, allow_unicode=True
        )


class SweepConfigYAMLImporter:
    """Import sweep options from YAML format with validation."""

    def __init__(self, yaml_content: str):
        """
        Initialize importer with YAML content.

        Args:
            yaml_content: YAML string to parse
        """
        self.yaml_content = yaml_content
        self.results = {
            "options": {},  # {key: value, ...}
            "errors": [],  # [(key, [error_messages]), ...]
        }

    def import_options(self) -> dict:
        """
        Parse and validate every option in the YAML content.

        Returns:
            Dictionary with results:
            {
                'options': {key: value, ...},
                'errors': [(key, error_messages), ...]
            }
        """
        try:
            data = self._parse_yaml()
            self._validate_schema(data)
        except Exception as e:
            # Parse or schema errors affect entire file
            self.results["errors"].append(("YAML File", [str(e)]))
            return self.results

        for key, value in data.items():
            errors = self._validate_option(key, value)
            if errors:
                self.results["errors"].append((key, errors))
            else:
                self.results["options"][key] = self._coerce(key, value)

        return self.results

    def _parse_yaml(self) -> dict:
        """Parse YAML content with error handling."""
        try:
            data = yaml.safe_load(self.yaml_content)
            if data is None:
                raise ValueError("Empty YAML file")
            return data
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML syntax: {str(e)}")

    def _validate_schema(self, data: Any):
        """Validate top-level YAML structure."""
        if not isinstance(data, dict):
            raise ValueError("YAML must contain a mapping of option keys at top level")

    def _validate_option(self, key: Any, value: Any) -> list[str]:
        if key not in ALLOWED_KEYS:
            return [f"Unknown option; allowed keys are {sorted(ALLOWED_KEYS)}"]
        if value is None:
            return ["Value must not be empty"]
        if key in BOOL_KEYS:
            return [] if isinstance(value, bool) else ["Must be true or false"]
        if key in INT_KEYS:
            ok = isinstance(value, int) and not isinstance(value, bool)
            return [] if ok else ["Must be an integer"]
        if key in FLOAT_KEYS:
            return [] if _is_number(value) else ["Must be a number"]
        if key in LIST_KEYS:
            if not isinstance(value, list) or not value:
                return ["Must be a non-empty list of numbers"]
            bad = [v for v in value if not _is_number(v)]
            return [f"Not a number: {v!r}" for v in bad]
        return [] if isinstance(value, str) else ["Must be a string"]

    def _coerce(self, key: str, value: Any) -> Any:
        if key in FLOAT_KEYS:
            return float(value)
        if key in LIST_KEYS:
            return [float(v) for v in value]
        return value


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def load_options(path: str | Path) -> dict[str, Any]:
    """
    Read and validate a configuration file.

    Raises:
        ConfigError: if the file is missing or any option is invalid
    """
    path = Path(path)
    try:
        content = path.read_text()
    except OSError as e:
        raise ConfigError([f"Cannot read config file {path}: {e}"]) from e
    results = SweepConfigYAMLImporter(content).import_options()
    if results["errors"]:
        raise ConfigError([f"{key}: {'; '.join(messages)}" for key, messages in results["errors"]])
    logger.debug("Loaded %d options from %s", len(results["options"]), path)
    return results["options"]


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
    base: dict[str, Any] | None = None,
) -> SweepConfig:
    """
    Layer built-in defaults, then base (environment settings), then the config file,
    then explicit overrides.

    None-valued entries are ignored so unset command-line flags keep file values.

    Raises:
        ConfigError: listing every invalid option
    """
    options = {k: v for k, v in (base or {}).items() if v is not None}
    if path is not None:
        options.update(load_options(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        # a flag for one of eps / eps_list replaces the file's value for the other
        options.pop({"eps": "eps_list", "eps_list": "eps"}.get(key, key), None)
        options[key] = value
    unknown = sorted(set(options) - ALLOWED_KEYS)
    if unknown:
        raise ConfigError([f"Unknown option: {key}" for key in unknown])
    logger.debug("Effective options over defaults %s: %s", sorted(DESK_DEFAULTS), options)
    return SweepConfig.from_options(options)
