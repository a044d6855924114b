"""This module contains the settings UI for the explorer."""

import streamlit as st
from streamlit.delta_generator import DeltaGenerator
from config import ConfigVars
from data_types.explorer import ExplorerSettings
from labels.descriptors import DESCRIPTOR_NAMES
from utils.streamlit_decorators import expander_decorator

config = ConfigVars()


def image_settings(col: DeltaGenerator) -> tuple[int, float, int | None]:
    """Render the image controls and return size, resolution and rotation seed."""
    image_size = col.number_input(
        "Image size (pixels)", value=config.IMAGE_SIZE, min_value=8, step=8
    )
    resolution = col.number_input(
        "Resolution (units per pixel)",
        value=config.IMAGE_RESOLUTION,
        min_value=0.05,
        step=0.05,
    )
    rotate = col.checkbox("Random rotation")
    seed = col.number_input("Rotation seed", value=0, step=1, disabled=not rotate)
    return int(image_size), float(resolution), int(seed) if rotate else None


@expander_decorator("Edit Settings")
def render_settings() -> ExplorerSettings:
    """
    Render the settings for the explorer and return them.
    """
    col1, col2 = st.columns(2)

    image_size, resolution, rotation_seed = image_settings(col1)
    sequence_length = col1.number_input(
        "Sequence length", value=config.SEQUENCE_LENGTH, min_value=1, step=1
    )
    descriptor_count = col1.slider(
        "Descriptors", 1, len(DESCRIPTOR_NAMES), len(DESCRIPTOR_NAMES)
    )

    with col2:
        st.markdown(config.HELP_TEXT)

    return {
        "image_size": image_size,
        "resolution": resolution,
        "rotation_seed": rotation_seed,
        "sequence_length": int(sequence_length),
        "descriptor_count": int(descriptor_count),
    }
