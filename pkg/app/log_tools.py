"""Logging configuration for the project."""

import logging
import logging.config
import os
import time
from collections.abc import Callable
from functools import wraps
from typing import Any, TypeVar

import numpy as np
from config import ConfigVars

T = TypeVar("T")


def summarize_value(value: Any, limit: int = 120) -> str:
    """Compact description of a return value: shapes for arrays, truncated repr."""
    if isinstance(value, np.ndarray):
        return f"ndarray{value.shape} {value.dtype}"
    if isinstance(value, tuple | list) and value and len(value) <= 8:
        inner = ", ".join(summarize_value(item, limit=40) for item in value)
        return f"({inner})" if isinstance(value, tuple) else f"[{inner}]"
    if isinstance(value, tuple | list):
        return f"{type(value).__name__}[{len(value)}]"
    text = repr(value)
    return text if len(text) <= limit else f"{text[:limit]}..."


class Logger:
    """Class to handle logging configuration."""

    _config = ConfigVars()

    _log_name = _config.LOG_NAME
    _log_file_path = os.path.abspath(
        os.environ.get("CHEMNET_LOG_FILE_PATH", _config.LOG_FILE_PATH)
    )

    # Create the directory for log files if it doesn't exist
    if not os.path.exists(os.path.dirname(_log_file_path)):
        os.makedirs(os.path.dirname(_log_file_path))
    _logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "color": {
                "()": "colorlog.ColoredFormatter",
                "format": "%(log_color)s%(levelname)s:%(name)s:%(message)s",
                "log_colors": _config.LOG_COLORS.model_dump(),
            },
            "plain": {
                "format": "%(asctime)s %(levelname)s:%(name)s:%(message)s",
            },
        },
        "handlers": {
            "file": {
                "class": "logging.FileHandler",
                "formatter": "plain",
                "filename": _log_file_path,
            },
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "color",
            },
        },
        "loggers": {
            _log_name: {
                "handlers": ["file", "console"],
                "level": os.environ.get("CHEMNET_LOG_LEVEL", _config.LOG_LEVEL),
            },
        },
    }

    # Load the logging configuration using dictConfig
    try:
        logging.config.dictConfig(_logging_config)
    except ValueError as e:
        print(f"Error occurred during logging configuration: {e!s}")
        raise

    app_logger = logging.getLogger(_log_name)
    app_logger.debug("Logging is configured.")

    @classmethod
    def log(
        cls,
        func: Callable[..., T],
        logger: logging.Logger | None = None,
    ) -> Callable[..., T]:
        """Decorator to log calls, elapsed time and a summary of the result."""
        if logger is None:
            logger = cls.app_logger

        @wraps(func)  # preserve the metadata of the decorated function.
        def wrapper(*args: Any, **kwargs: Any) -> T:
            logger.debug("Calling %s", func.__name__)
            started = time.perf_counter()
            result = func(*args, **kwargs)
            elapsed = time.perf_counter() - started
            logger.info(
                "%s finished in %.2fs -> %s",
                func.__name__,
                elapsed,
                summarize_value(result),
            )
            return result

        return wrapper

    @classmethod
    def get_app_logger(cls) -> logging.Logger:
        """Class method to access the app_logger attribute."""
        return cls.app_logger

    @classmethod
    def set_level(cls, level: str | int) -> None:
        """Change the application log level at runtime."""
        cls.app_logger.setLevel(level)
