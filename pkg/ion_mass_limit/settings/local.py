"""
Local development settings for the ion_mass_limit project.
"""

import os

from .base import *  # noqa: F403, F401

# Solver modules log every step at DEBUG; only open them up when asked to.
if DEBUG:  # noqa: F405
    LOGGING["root"]["level"] = "DEBUG"  # noqa: F405
    LOGGING["loggers"]["plasma"]["level"] = "DEBUG"  # noqa: F405
    LOGGING["loggers"]["limits"]["level"] = "DEBUG"  # noqa: F405

# Anchor outputs at the checkout rather than the working directory
if not os.getenv("IML_OUTPUT_DIR"):
    OUTPUT_DIR = BASE_DIR / "output"  # noqa: F405
