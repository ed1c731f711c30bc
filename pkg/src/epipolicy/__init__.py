"""Epidemic transmission inference and intervention cost-benefit simulation."""

__version__ = "0.1.0"
