"""Dilation profiles of one-dimensional weighted measures."""

__version__ = "0.1.0"
