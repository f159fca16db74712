"""Cauchy transforms of planar measures: principal values, identities and comb geometry."""

__version__ = "0.1.0"
