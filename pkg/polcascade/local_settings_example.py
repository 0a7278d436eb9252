# Enable more debugging information
DEBUG = True

# Show the per-replica fit progress and cache builds.
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {"stderr": {"class": "logging.StreamHandler"}},
    "loggers": {"polcascade": {"handlers": ["stderr"], "level": "DEBUG"}},
}

# Cheaper Monte Carlo runs while developing
MC_DEFAULT_SAMPLES = 100000

# Fewer fit replicas
FIT_DEFAULT_STARTS = 4
