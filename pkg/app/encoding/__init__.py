"""Text modality: vocabulary and one-hot SMILES encoding."""
