"""Exact toolkit for Weyl hyperplane patterns, their linear embeddings and AN-maps."""

__version__ = "0.1.0"
