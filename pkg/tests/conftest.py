"""Keeps the tests directory importable so test modules can share the
strategy helpers in strategies.py."""
