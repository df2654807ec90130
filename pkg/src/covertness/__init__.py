"""Detectability bounds and the covert power cap."""
