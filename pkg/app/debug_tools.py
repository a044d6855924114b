"""Debugging tools."""

import logging
from typing import Any

import debugpy  # type: ignore


class Debugger:
    """Start a debugpy server once per process, for the CLI or the explorer."""

    _debugger_set_up = False

    @classmethod
    def setup_debugpy(
        cls,
        logger: logging.Logger,
        flag: bool = False,
        wait_for_client: bool = False,
        host: str = "localhost",
        port: int = 8765,
        session_state: Any | None = None,
    ) -> bool:
        """
        Set the debug flag and start the debugpy server.

        :param logger: Logger instance to log messages.
        :param flag: Debug flag to enable/disable debugging.
        :param wait_for_client: Flag to wait for the debug client to attach.
        :param host: Host for the debugpy server.
        :param port: Port for the debugpy server.
        :param session_state: Streamlit session state, when run in the explorer.
        :return: True when a debug server is listening.
        """
        if session_state is not None and "debugging" not in session_state:
            session_state.debugging = None

        if flag:
            active = cls._activate_debugging(logger, wait_for_client, host, port)
        else:
            if session_state is None or session_state.debugging is None:
                logger.info(">>> Remote debugging is NOT active <<<")
            active = False
        if session_state is not None:
            session_state.debugging = active
        return active

    @classmethod
    def _activate_debugging(
        cls,
        logger: logging.Logger,
        wait_for_client: bool,
        host: str,
        port: int,
    ) -> bool:
        if cls._debugger_set_up or debugpy.is_client_connected():
            return True
        try:
            debugpy.listen((host, port))
            cls._debugger_set_up = True

            if wait_for_client:
                logger.info(">>> Waiting for debug client attach... <<<")
                debugpy.wait_for_client()
                logger.info(">>> ...attached! <<<")

            logger.info(
                ">>> Remote debugging activated (host=%s, port=%d) <<<", host, port
            )
        except (ConnectionError, ValueError, TypeError, RuntimeError) as error:
            logger.exception("Debugger setup failed with error: %s", error)
            return False
        return True
