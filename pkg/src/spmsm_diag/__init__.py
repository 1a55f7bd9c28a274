"""Analytical SPMSM fault simulator with FFT sideband diagnosis."""

__version__ = "0.1.0"
