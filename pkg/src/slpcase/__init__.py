"""Tools for generating, scoring, and analyzing school SLP case files."""

__version__ = "0.1.0"
