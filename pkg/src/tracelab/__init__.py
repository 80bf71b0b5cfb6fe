"""Trace spaces of weighted algebras on discrete sets: divided differences, separation, coverings, interpolants."""

__version__ = "0.1.0"
