"""Desk-scale toolkit for subspace-hypercyclicity of weighted shifts."""

__version__ = "0.1.0"
