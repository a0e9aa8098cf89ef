"""Minkowski, orthogonal and Steiner symmetrization of convex bodies, with a
spherical-harmonics toolkit for measuring how fast they converge to a ball."""

__version__ = "0.1.0"
