"""operadkit: exact-arithmetic operads, cobar complexes and strata tables."""

__version__ = "0.1.0"
