"""Tile codes: construction, logical algebra, sliding and distance bounds."""

__version__ = "0.1.0"
