"""
Optional environment overrides, read from the process environment and a
``.env`` file in the working directory.
"""

import os
from typing import TypedDict

from dotenv import load_dotenv
from log_tools import Logger

app_logger = Logger.get_app_logger()


class EnvVars(TypedDict):
    """Type definition for environment overrides."""

    CHEMNET_LOG_LEVEL: str | None
    CHEMNET_LOG_FILE_PATH: str | None
    CHEMNET_OUTPUT_DIR: str | None


class EnvVarsLoader:
    """Class for loading environment variables."""

    _env_vars: EnvVars | None = None

    @staticmethod
    def validate_env_vars(env_vars: EnvVars) -> None:
        """Validate the environment variables."""
        level = env_vars["CHEMNET_LOG_LEVEL"]
        if level is not None and level.upper() not in {
            "DEBUG",
            "INFO",
            "WARNING",
            "ERROR",
            "CRITICAL",
        }:
            err_msg = f"Unknown CHEMNET_LOG_LEVEL: {level}"
            app_logger.error(err_msg)
            raise ValueError(err_msg)

    @staticmethod
    def load_env(refresh: bool = False) -> EnvVars:
        """
        Load overrides from the environment (and ``.env`` if present).

        Returns:
            EnvVars: the override values; unset variables are None.
        """
        if EnvVarsLoader._env_vars is not None and not refresh:
            return EnvVarsLoader._env_vars

        load_dotenv()

        env_vars: EnvVars = {
            "CHEMNET_LOG_LEVEL": os.getenv("CHEMNET_LOG_LEVEL"),
            "CHEMNET_LOG_FILE_PATH": os.getenv("CHEMNET_LOG_FILE_PATH"),
            "CHEMNET_OUTPUT_DIR": os.getenv("CHEMNET_OUTPUT_DIR"),
        }

        EnvVarsLoader.validate_env_vars(env_vars)

        EnvVarsLoader._env_vars = env_vars

        return env_vars
