"""Modular data of cyclic permutation orbifolds."""

__version__ = "0.1.0"
