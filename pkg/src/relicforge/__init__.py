"""COBOL-to-Java modernization toolkit."""

__version__ = "0.1.0"
