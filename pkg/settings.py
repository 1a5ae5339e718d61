import logging
import os

from errors import ConfigError

DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s :: %(levelname)s :: %(name)s :: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

LAMHOM_THREADS_ENV = "LAMHOM_THREADS"
LAMHOM_LOG_LEVEL_ENV = "LAMHOM_LOG_LEVEL"


def get_thread_count() -> int:
    """
    Worker cap for parallel sweeps.

    Read from LAMHOM_THREADS at call time, falling back to os.cpu_count().
    """
    raw = os.environ.get(LAMHOM_THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{LAMHOM_THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{LAMHOM_THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def get_log_level(override: str | None = None) -> int:
    name = (override or os.environ.get(LAMHOM_LOG_LEVEL_ENV) or DEFAULT_LOG_LEVEL).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"unknown log level {name!r}")
    return level


def configure_logging(level: str | None = None) -> None:
    """Root logger setup shared by the CLI and the API server. Logs go to stderr."""
    root = logging.getLogger()
    root.setLevel(get_log_level(level))
    if not any(getattr(h, "_lamhom", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
        handler._lamhom = True
        root.addHandler(handler)
