"""Datasets, splits, training and the pre-train / fine-tune experiments."""
