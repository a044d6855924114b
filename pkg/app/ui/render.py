"""Streamlit rendering of the molecule explorer."""

import logging

import numpy as np
import streamlit as st
from chem.canon import canonicalize
from config import ConfigVars
from data_types.explorer import ExplorerSettings, MoleculeView
from errors import ChemNetError
from harness.corpus import load_seed_corpus
from ui.molecule_view import ENGD_CHANNELS, build_view
from ui.settings import render_settings
from utils.common import save_output
from utils.streamlit_decorators import error_to_streamlit, spinner_decorator

config = ConfigVars()


@st.cache_data
def seed_vocabulary_corpus() -> list[str]:
    """Seed corpus strings; the one-hot vocabulary is built over them."""
    return [canonicalize(smiles) for smiles in load_seed_corpus()]


def render_input_box() -> str | None:
    """
    Render the input box for the SMILES string and return its value.
    """
    smiles: str = st.text_input("Enter SMILES:", config.DEFAULT_SMILES)
    return smiles.strip() or None


def _as_display(channel: np.ndarray, size: int) -> np.ndarray:
    """Upscale a channel with nearest-neighbour blocks so pixels stay visible."""
    scale = max(1, 320 // size)
    return np.kron(np.clip(channel, 0.0, 1.0), np.ones((scale, scale)))


def render_images(view: MoleculeView) -> None:
    size = view["std_image"].shape[0]
    st.subheader("Std image")
    st.image(_as_display(view["std_image"][:, :, 0], size), clamp=True)
    st.subheader("EngD channels")
    columns = st.columns(len(ENGD_CHANNELS))
    for k, (column, name) in enumerate(zip(columns, ENGD_CHANNELS, strict=True)):
        column.caption(name)
        column.image(_as_display(view["engd_image"][:, :, k], size), clamp=True)


def render_encoding(view: MoleculeView) -> None:
    one_hot = view["one_hot"]
    used = np.flatnonzero(one_hot[:, 1:].any(axis=1))
    st.subheader("One-hot encoding")
    st.caption(
        f"{one_hot.shape[0]} x {one_hot.shape[1]}; rows {used.min()}..{used.max()}"
        " hold characters, the rest are padding"
    )
    st.image(_as_display(one_hot.T, one_hot.shape[0]), clamp=True)
    st.text(" ".join(view["vocabulary"]))


@spinner_decorator("Computing...")
@error_to_streamlit
def compute_view(smiles: str, settings: ExplorerSettings) -> MoleculeView:
    return build_view(smiles, settings, seed_vocabulary_corpus())


def render_output(
    smiles: str,
    settings: ExplorerSettings,
    app_logger: logging.Logger | None = None,
) -> None:
    """
    Render everything the pipeline derives from one SMILES string.
    """
    try:
        view = compute_view(smiles, settings)
    except ChemNetError as err:
        if app_logger:
            app_logger.warning("Explorer rejected %s: %s", smiles, err)
        st.error(f"{err.reason}: {err}")
        return

    st.markdown(f"**Canonical SMILES:** `{view['canonical']}`")
    left, right = st.columns(2)
    with left:
        st.subheader("Descriptors")
        st.dataframe(view["descriptors"], hide_index=True)
    with right:
        st.subheader("Gasteiger charges")
        st.dataframe(view["charges"], hide_index=True)

    render_images(view)
    render_encoding(view)

    if st.button("Save descriptors"):
        table = view["descriptors"].to_csv(index=False)
        path = save_output(view["canonical"], table, config.OUTPUT_DIR)
        st.success(f"Saved {path}")


def render_layout(
    app_logger: logging.Logger | None = None,
    smiles: str | None = None,
    settings: ExplorerSettings | None = None,
) -> None:
    """
    Render the layout of the app.
    """

    st.header(config.APP_TITLE)

    if not smiles:
        smiles = render_input_box()
        if not smiles:
            return

    settings = settings or render_settings()

    render_output(smiles, settings, app_logger=app_logger)
