"""Filesystem and Streamlit helpers."""
