"""2D layout, rotation and rasterization of molecules."""
