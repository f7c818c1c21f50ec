"""
Django settings for the tapping severity classifier.

The project has no database and no HTTP surface: Django provides settings,
logging configuration, management commands and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'changeme')

DEBUG = bool(int(os.environ.get('DEBUG', 0)))

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'core',
    'network',
    'tapping',
    'evaluation',
    'rest_framework',
]

# Commands only read and write files.
DATABASES = {}

# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        }
        for app in ('core', 'network', 'tapping', 'evaluation')
    },
}


REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
}

# Run artifacts (checkpoints, curves, reports) land here unless a command
# is given --out-dir.
OUT_DIR = Path(os.environ.get('OUT_DIR', BASE_DIR / 'runs'))

EXTRACT_WORKERS = int(os.environ.get('EXTRACT_WORKERS', 4))
