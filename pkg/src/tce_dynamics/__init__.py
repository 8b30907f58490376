"""Translated cone exchange transformations and their one-dimensional reductions."""

from .numeric import PHI, GoldenRational, gr_floor, gr_sign, gr_to_float, parse_golden

__all__ = ["PHI", "GoldenRational", "gr_floor", "gr_sign", "gr_to_float", "parse_golden"]

__version__ = "0.1.0"
