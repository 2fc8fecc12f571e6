import logging
import os

from modules.errors import ConfigError


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {value}")
    return value


def get_worker_count() -> int:
    """
    Return the number of worker threads for parallel sections.

    Reads GREENKERNEL_THREADS; defaults to the machine's parallelism.
    """
    return _positive_int("GREENKERNEL_THREADS", os.cpu_count() or 1)


def get_log_level() -> int:
    """Return the logging level, override via GREENKERNEL_LOG_LEVEL (name or number)."""
    raw = os.getenv("GREENKERNEL_LOG_LEVEL", "WARNING").strip().upper()
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw)
    if not isinstance(level, int):
        raise ConfigError(f"Unknown log level {raw!r}")
    return level


def get_default_quadrature() -> tuple:
    """Return (nodes per panel, panels per piece) for the default Gauss-Legendre rule."""
    return (
        _positive_int("GREENKERNEL_QUAD_NODES", 32),
        _positive_int("GREENKERNEL_QUAD_PANELS", 4),
    )


def get_float_format() -> str:
    """Round-trip safe float format used for every CSV written by the CLI."""
    return "%.17g"
