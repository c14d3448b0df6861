"""Algorithmic services behind the segmentation CLI."""
