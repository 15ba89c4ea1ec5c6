"""Exact second-order subdifferentials, chain rules and tilt stability."""

__version__ = "0.1.0"
