"""Sketch-to-contour style transfer and factorised sketch-based image retrieval."""

__version__ = "0.1.0"
