"""Exact finite-level models of Euler-system descent and Kolyvagin classes."""

__version__ = "0.1.0"
