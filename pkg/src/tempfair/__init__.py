"""Temporal fair division of indivisible goods."""
