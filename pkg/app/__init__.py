"""ChemNet weak-supervision toolkit: sources live flat under app/."""
