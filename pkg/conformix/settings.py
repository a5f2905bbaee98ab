"""
Django settings for the conformix project.

The project has no database and no web surface: Django provides the
management-command CLI, the settings layer and the test runner.  Numerical
defaults live in the ``CONFORMIX`` dict and can be overridden from the
environment or a ``.env`` file.
"""

from pathlib import Path
import os

import dotenv

dotenv.load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "conformix-local-only")

DEBUG = os.environ.get("DJANGO_DEBUG", "0") == "1"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'toolkit',
]

DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


def _env_flag(name: str, default: bool = False) -> bool:
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


# Numerical defaults; command-line flags and --config files override these.
CONFORMIX = {
    "OUTPUT_DIR": os.environ.get("CONFORMIX_OUTPUT_DIR", str(BASE_DIR / "runs")),
    "SEED": int(os.environ.get("CONFORMIX_SEED", "0")),
    "EPSILON_MIN": float(os.environ.get("CONFORMIX_EPSILON_MIN", "1e-3")),
    "TIME_NODES": int(os.environ.get("CONFORMIX_TIME_NODES", "64")),
    "RESIDUAL_TOL": float(os.environ.get("CONFORMIX_RESIDUAL_TOL", "1e-9")),
    "RTOL": float(os.environ.get("CONFORMIX_RTOL", "1e-7")),
    "T_FINAL": float(os.environ.get("CONFORMIX_T_FINAL", "5.0")),
    "SAMPLE_EVERY": int(os.environ.get("CONFORMIX_SAMPLE_EVERY", "10")),
    "AUDIT_CONSTANT": float(os.environ.get("CONFORMIX_AUDIT_CONSTANT", "10.0")),
    "EXTENDED_TESTS": _env_flag("CONFORMIX_EXTENDED_TESTS"),
}

LOG_LEVEL = os.environ.get("CONFORMIX_LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "geometry": {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False},
        "toolkit": {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False},
    },
}
