"""
Base settings for the ion_mass_limit project.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

DEBUG = os.getenv("IML_DEBUG", "False") == "True"

# Output and sweep defaults; config files and command-line flags override these.
OUTPUT_DIR = Path(os.getenv("IML_OUTPUT_DIR", "output"))
WORKERS = int(os.getenv("IML_WORKERS", "1"))
DEFAULT_N = int(os.getenv("IML_DEFAULT_N", "128"))

LOG_LEVEL = os.getenv("IML_LOG_LEVEL", "INFO")


# Logging
# Applied with logging.config.dictConfig by ion_mass_limit.cli at start-up.

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": LOG_LEVEL,
    },
    "loggers": {
        "plasma": {"level": "INFO"},
        "limits": {"level": "INFO"},
    },
}
