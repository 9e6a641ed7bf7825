"""
Django settings for phstab project.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='phstab-development-key-not-for-production')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=True, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=lambda v: [s.strip() for s in v.split(',')])

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Third party
    'rest_framework',

    # Local apps
    'topology',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

# REST Framework Settings
# The API is stateless and unauthenticated: every endpoint is a pure computation.
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'EXCEPTION_HANDLER': 'rest_framework.views.exception_handler',
    'NON_FIELD_ERRORS_KEY': 'error',
    'DEFAULT_THROTTLE_CLASSES': [
        'rest_framework.throttling.AnonRateThrottle',
    ],
    'DEFAULT_THROTTLE_RATES': {
        'anon': config('PHSTAB_API_RATE', default='100/hour'),
    },
}

# Persistence / stabilization settings
PHSTAB = {
    'THREADS': config('PHSTAB_THREADS', default=1, cast=int),
    'DEFAULT_SEED': config('PHSTAB_DEFAULT_SEED', default=0, cast=int),
    'OUTPUT_DIR': Path(config('PHSTAB_OUTPUT_DIR', default=str(BASE_DIR / 'runs'))),
    'CSV_FLOAT_FORMAT': '.17g',
    # Upper bound on trials accepted by the HTTP API
    'API_MAX_TRIALS': config('PHSTAB_API_MAX_TRIALS', default=10000, cast=int),
}

ROOT_URLCONF = 'phstab.urls'

WSGI_APPLICATION = 'phstab.wsgi.application'

# ----------------------------
# DATABASE
# ----------------------------
# Nothing is persisted; the default connection only satisfies Django's checks.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging Configuration

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'topology': {
            'handlers': ['console'],
            'level': config('PHSTAB_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}
