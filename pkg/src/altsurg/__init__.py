"""Alternating surgery slopes via changemaker lattices and obtuse superbases."""

__version__ = "0.1.0"
