"""Crossing-restricted drawings of partially predrawn graphs."""

__version__ = "0.1.0"
