"""Linear NLC-width decompositions of tournaments via bag monoids and factorisation forests."""

__version__ = "0.1.0"
