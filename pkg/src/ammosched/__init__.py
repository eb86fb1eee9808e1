"""Thermally aware scheduling of renewable power-to-ammonia plants."""

__version__ = "0.1.0"
