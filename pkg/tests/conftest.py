"""Ensure the tests directory is importable (shared oracle helpers)."""
