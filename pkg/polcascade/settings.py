# Django settings for the polcascade project.
#
# The project has no database, no templates and no web frontend; Django
# provides the configuration layer, the management commands and the test
# runner.

DEBUG = False

DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.AutoField"

TIME_ZONE = "GMT"
LANGUAGE_CODE = "en-us"
USE_I18N = False

SECRET_KEY = "REALLYCHANGETHISINLOCAL_SETTINGS.PY"

INSTALLED_APPS = ("polcascade.transmission.apps.TransmissionConfig",)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s: %(message)s"},
    },
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "polcascade": {
            "handlers": ["stderr"],
            "level": "WARNING",
            "propagate": False,
        },
    },
}

# Quadrature. Gauss-Legendre nodes per piece, doubled until two successive
# values agree within the tolerances.
QUAD_BASE_NODES = 64
QUAD_RTOL = 1e-10
QUAD_ATOL = 1e-12
QUAD_MAX_DOUBLINGS = 6

# Shrinkage model caches
KERNEL_CACHE_POINTS = 1441  # kernel normalization samples over [-pi/2, pi/2]
OUTPUT_TABLE_POINTS = 181   # output distribution samples per smooth piece

# Monte Carlo
MC_TABLE_BINS = 4096
MC_DEFAULT_SAMPLES = 1000000
MC_DEFAULT_SEED = 1
MC_DEFAULT_STREAMS = 4

# Fitting
FIT_DEFAULT_STARTS = 20
FIT_DEFAULT_SEED = 1
FIT_MAXITER = 5000
FIT_START_SPREAD = 0.3

DEFAULT_GRID = "0:90:1"  # degrees, start:stop:step
CSV_SIGNIFICANT_DIGITS = 12
CHSH_DEFAULT_STEP_DEG = 7.5

try:
    from .local_settings import *  # noqa: F403
except ImportError:
    pass
