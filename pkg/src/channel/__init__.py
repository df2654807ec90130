"""Geometric far-field channel model of the Alice-Bob/Eve/Willie links."""
