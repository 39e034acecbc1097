"""Pseudo-spectral laboratory for the long-wave regime of the Gross-Pitaevskii equation."""

__version__ = "0.1.0"
