"""Explicit semitoric families: polygons, classification, reduced spaces and heights."""

__version__ = "0.1.0"
