"""Placement schemes. Importing the package registers every scheme under `placement_schemes`."""

from src.schemes.registry import discover_schemes

discover_schemes()
