"""Quantitative corpus dialectology for place-based social media communities."""

__version__ = "0.1.0"
