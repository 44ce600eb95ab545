"""dgtwist: exact computations with finite DG categories and twisted complexes."""

__version__ = "0.1.0"
