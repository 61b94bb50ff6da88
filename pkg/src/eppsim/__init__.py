"""Entanglement purification maps with a linear-optics brute-force oracle."""

__version__ = "0.1.0"
