"""Transformer tweet encoder emitting the reval binary embedding format."""

__version__ = "0.1.0"
