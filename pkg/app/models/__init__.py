"""Chemception-lite and SMILES2vec-lite model builders."""
