"""Exact Fourier expansions of orthogonal modular forms and their higher pullbacks."""

__version__ = "0.1.0"
