"""realarith: recursive realizability over a coded machine."""

__version__ = "0.1.0"
