"""Gaeta resolutions, exceptional bundles and cone computations on the projective plane."""

__version__ = "0.1.0"
