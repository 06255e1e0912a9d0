"""
Settings module for the ion_mass_limit project.

By default, loads local development settings.
"""

from .local import *  # noqa: F403, F401
