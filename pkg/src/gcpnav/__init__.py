"""Goal-conditioned trajectory prediction and hierarchical planning."""

__version__ = "0.1.0"
