"""
Django settings for the arccartogram project.

The project hosts two apps: `cartogram` (circular-arc cartogram pipeline and the
`build` / `skeleton` commands) and `gadgets` (hardness gadget instance generator
and the `gadget` command). Everything numerical is configured in the
`CARTOGRAM` block below and can be overridden from the environment or `.env`.
"""

from pathlib import Path
import os
from environ import Env

env = Env()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env.read_env(os.path.join(BASE_DIR, '.env'))

# The project serves no requests; the key only satisfies Django's startup checks.
SECRET_KEY = env('SECRET_KEY', cast=str, default='arccartogram-local-only')

DEBUG = env('DEBUG', cast=bool, default=False)

ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=[])


# Application Definition
DJANGO_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
]

LOCAL_APPS = [
    'cartogram.apps.CartogramConfig',
    'gadgets.apps.GadgetsConfig',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

INSTALLED_APPS = DJANGO_APPS + LOCAL_APPS + THIRD_PARTY_APPS

# Pipeline stage timing report, printed only when DEBUG is on
STAGE_LOGGER_JUST_TOTAL = env('STAGE_LOGGER_JUST_TOTAL', cast=bool, default=False)


# Database (unused by the pipeline; kept so management commands start cleanly)
DATABASES = {
    'default': {
        'ENGINE': env('DATABASE_ENGINE', cast=str, default='django.db.backends.sqlite3'),
        'NAME': env('DATABASE_NAME', cast=str, default=BASE_DIR / 'db.sqlite3'),
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = env('TIME_ZONE', cast=str, default='UTC')

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Cartogram pipeline
CARTOGRAM = {
    'GEOM_EPS': env('CARTOGRAM_GEOM_EPS', cast=float, default=1e-9),
    'SNAP_EPS_RATIO': env('CARTOGRAM_SNAP_EPS_RATIO', cast=float, default=1e-6),
    'MAX_SAGITTA_RATIO': env('CARTOGRAM_MAX_SAGITTA_RATIO', cast=float, default=1.0),
    'BISECTION_TOL': env('CARTOGRAM_BISECTION_TOL', cast=float, default=1e-12),
    'BISECTION_MAX_ITER': env('CARTOGRAM_BISECTION_MAX_ITER', cast=int, default=200),
    'MAX_SAGITTA_ITER': env('CARTOGRAM_MAX_SAGITTA_ITER', cast=int, default=60),
    'FLOW_EPS': env('CARTOGRAM_FLOW_EPS', cast=float, default=1e-12),
    'BALANCE_TOL': env('CARTOGRAM_BALANCE_TOL', cast=float, default=1e-9),
    'MODE': env('CARTOGRAM_MODE', cast=str, default='weak'),
    # reserved, the pipeline is deterministic
    'SEED': env('CARTOGRAM_SEED', cast=int, default=None),
}


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'cartogram': {
            'handlers': ['console'],
            'level': env('CARTOGRAM_LOG_LEVEL', cast=str, default='WARNING'),
            'propagate': False,
        },
        'gadgets': {
            'handlers': ['console'],
            'level': env('CARTOGRAM_LOG_LEVEL', cast=str, default='WARNING'),
            'propagate': False,
        },
    },
}
