"""
ChemNet Molecule Explorer

Streamlit page that shows how one SMILES string is seen by the pre-training
pipeline: canonical form, descriptor labels, Gasteiger charges, Std/EngD
images and the one-hot text encoding.

    streamlit run app/main.py
"""

# External libraries
import streamlit as st

# Configuration and utilities
from config import ConfigVars, with_config
from debug_tools import Debugger
from log_tools import Logger

# UI components
from ui.render import render_layout

# Set up the application logger
app_logger = Logger.get_app_logger()


@with_config
def main(config: ConfigVars) -> None:
    """
    Main entry point for the explorer.

    Args:
        config (ConfigVars): application configuration variables.
    """
    app_logger.info("Loading layout")

    # Set up the page configuration before rendering the layout
    st.set_page_config(page_title=config.APP_TITLE, page_icon="🧪", layout="wide")

    Debugger.setup_debugpy(
        app_logger,
        flag=config.ATTACH_DEBUGGER,
        wait_for_client=config.WAIT_FOR_CLIENT,
        host=config.DEBUGPY_HOST,
        port=config.DEFAULT_DEBUG_PORT,
        session_state=st.session_state,
    )

    render_layout(app_logger=app_logger)


if __name__ == "__main__":
    main()
