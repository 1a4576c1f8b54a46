"""Finite-dimensional laboratory for hypercyclicity of generalised derivations and elementary operators."""

__version__ = "0.1.0"
