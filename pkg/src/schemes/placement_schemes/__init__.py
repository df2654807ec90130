"""Antenna placement schemes compared by the experiment harness."""
