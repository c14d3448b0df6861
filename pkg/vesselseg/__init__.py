"""Tight-frame vessel segmentation with Hessian eigenvector constraints."""

__version__ = "0.1.0"
