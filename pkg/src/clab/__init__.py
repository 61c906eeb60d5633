"""Exact laboratory for multiplicative congruences, lattices, resultants and character sums."""

__version__ = "0.1.0"
