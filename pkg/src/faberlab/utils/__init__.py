"""Utility functions for faberlab."""
