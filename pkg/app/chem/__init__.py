"""Molecular graphs: SMILES reading and writing, perception, canonical form, charges."""
