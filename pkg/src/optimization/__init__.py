"""Beamforming, antenna-position and alternating-optimization solvers."""
