"""Toolkit for building direction-annotated parallel corpora and identifying translationese."""

__version__ = "0.1.0"
