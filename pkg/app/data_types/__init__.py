"""Data types shared across the toolkit."""
