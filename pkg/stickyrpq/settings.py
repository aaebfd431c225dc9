import os
from pathlib import Path
from dotenv import load_dotenv
import dj_database_url
load_dotenv()

# ==========================
# BASE DIR
# ==========================
BASE_DIR = Path(__file__).resolve().parent.parent

# ==========================
# SECURITY
# ==========================
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "unsafe-secret")
DEBUG = os.environ.get("DJANGO_DEBUG", "True").lower() in ("1", "true", "yes")

ALLOWED_HOSTS = os.environ.get(
    "ALLOWED_HOSTS",
    "*"
).split(",")

# ==========================
# INSTALLED APPS
# ==========================
INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",

    "reasoner",

    "rest_framework",
]

# ==========================
# MIDDLEWARE
# ==========================
MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "whitenoise.middleware.WhiteNoiseMiddleware",

    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",

    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

# ==========================
# URL / WSGI / ASGI
# ==========================
ROOT_URLCONF = "stickyrpq.urls"
WSGI_APPLICATION = "stickyrpq.wsgi.application"
ASGI_APPLICATION = "stickyrpq.asgi.application"

# ==========================
# TEMPLATES
# ==========================
TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

# ==========================
# DATABASE (SQLite locally, DATABASE_URL in deployment)
# ==========================
if os.environ.get("DATABASE_URL"):
    DATABASES = {
        "default": dj_database_url.config(
            default=os.environ.get("DATABASE_URL"),
            conn_max_age=600,
            ssl_require=True,
        )
    }
else:
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.sqlite3",
            "NAME": BASE_DIR / "db.sqlite3",
        }
    }

# ==========================
# REST FRAMEWORK
# ==========================
REST_FRAMEWORK = {
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "DEFAULT_AUTHENTICATION_CLASSES": (
        "rest_framework.authentication.SessionAuthentication",
    ),
}

# ==========================
# REASONER LIMITS
# ==========================
def _env_number(name, default, cast=int):
    value = os.environ.get(f"REASONER_{name}")
    return cast(value) if value not in (None, "") else default


REASONER = {
    "CHASE_MAX_ATOMS": _env_number("CHASE_MAX_ATOMS", 1_000_000),
    "REWRITE_MAX_ROUNDS": _env_number("REWRITE_MAX_ROUNDS", 10_000),
    "REWRITE_MAX_DISJUNCTS": _env_number("REWRITE_MAX_DISJUNCTS", 5_000),
    "COUNTERMODEL_MAX_ROUNDS": _env_number("COUNTERMODEL_MAX_ROUNDS", 64),
    "COUNTERMODEL_MAX_ATOMS": _env_number("COUNTERMODEL_MAX_ATOMS", 100_000),
    "ENUMERATION_MAX_NULLS": _env_number("ENUMERATION_MAX_NULLS", 3),
    "ENTAIL_BUDGET_SECONDS": _env_number("ENTAIL_BUDGET_SECONDS", 30.0, float),
    "ENTAIL_BIAS": _env_number("ENTAIL_BIAS", 0.5, float),
    "QUICK_SAMPLE_DEPTH": _env_number("QUICK_SAMPLE_DEPTH", 3),
}

# ==========================
# LOGGING
# ==========================
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "reasoner": {
            "handlers": ["console"],
            "level": os.environ.get("REASONER_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}

# ==========================
# PASSWORD VALIDATION
# ==========================
AUTH_PASSWORD_VALIDATORS = [
    {"NAME": "django.contrib.auth.password_validation.UserAttributeSimilarityValidator"},
    {"NAME": "django.contrib.auth.password_validation.MinimumLengthValidator"},
    {"NAME": "django.contrib.auth.password_validation.CommonPasswordValidator"},
    {"NAME": "django.contrib.auth.password_validation.NumericPasswordValidator"},
]

# ==========================
# STATIC FILES
# ==========================
STATIC_URL = "/static/"
STATIC_ROOT = BASE_DIR / "staticfiles"

# ==========================
# INTERNATIONALIZATION
# ==========================
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True

# ==========================
# DEFAULT AUTO FIELD
# ==========================
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"
