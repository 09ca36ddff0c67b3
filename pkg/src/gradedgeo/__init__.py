"""Symbolic kernel for Z2^n-graded geometry."""

__version__ = "0.1.0"
