"""Overconvergent distributions, Eichler-Shimura kernels and slope machinery over Q_p."""

__version__ = "0.1.0"
