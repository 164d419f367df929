"""Correlated total variation robust PCA (3DCTV-RPCA) and PCP toolkit."""

__version__ = "0.1.0"
