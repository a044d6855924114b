"""Weak-supervision labels: descriptor registry and normalization."""
