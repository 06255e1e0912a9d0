"""
Shared fixtures for experiments tests.

Configurations here are far below desk scale so whole sweeps finish in seconds.
"""

import pytest

from experiments.core.types import SweepConfig


@pytest.fixture
def config_factory():
    """Factory fixture for small sweep configurations.

    Returns a factory that layers keyword options over small-grid defaults and builds
    the configuration through `SweepConfig.from_options`, so every option key works.
    """

    def _create_config(**options) -> SweepConfig:
        """Create a configuration.

        Args:
            **options: any config-file key; defaults are d=1, n=32, t_end=0.5,
                sample_interval=0.1 and eps_list=[0.4, 0.2, 0.1]
        """
        values = {
            "eps_list": [0.4, 0.2, 0.1],
            "n": 32,
            "t_end": 0.5,
            "sample_interval": 0.1,
        }
        values.update(options)
        return SweepConfig.from_options(values)

    return _create_config


@pytest.fixture
def small_config(config_factory, tmp_path):
    """Default family on a 32-point grid, writing under a temporary directory."""
    return config_factory(output_dir=str(tmp_path))
