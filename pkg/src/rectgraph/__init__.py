"""Exact construction and analysis of rectangle graphs on tangential sites."""

__version__ = "0.1.0"
