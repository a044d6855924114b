"""Minimal deterministic numpy network engine."""
