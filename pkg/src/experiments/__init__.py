"""Experiment drivers behind the bench, verify-bounds and sweep commands."""
